//! Browser bindings for three operations: plotting an orbit, plotting the
//! observer's error profile, and masking then unmasking a text.

use tilechaos::codec::{error_profile, receive, transmit, ChannelMode, MixingCodec};
use tilechaos::io::{frames_from_text, frames_to_text, parse_int_matrix, parse_rational_list};
use tilechaos::ops::{seeded_bytes, seeded_state};
use tilechaos::scalar::to_scalars;
use tilechaos::{builtin_group, AffineSystem, ObserverKey, Rational};
use wasm_bindgen::prelude::*;

fn mode(q: u32) -> ChannelMode {
    if q == 0 {
        ChannelMode::Exact
    } else {
        ChannelMode::Digits(q)
    }
}

/// Flattened float orbit `x_0, ..., x_steps`, each state `dim` numbers long.
pub fn orbit_points(a: &str, b: &str, group: &str, seed: u64, steps: usize) -> Result<Vec<f64>, String> {
    let a = parse_int_matrix(a).map_err(|e| e.to_string())?;
    let b = if b.trim().is_empty() { vec![Rational::default(); a.dim()] } else { parse_rational_list(b).map_err(|e| e.to_string())? };
    let sys = AffineSystem::new(a, b, builtin_group(group).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let x0 = seeded_state(sys.group(), seed).map_err(|e| e.to_string())?;
    let traj = sys.trajectory(&to_scalars::<f64>(&x0), steps + 1).map_err(|e| e.to_string())?;
    Ok(traj.into_iter().flatten().collect())
}

/// JSON rows `{k, state_error, input_error, sent, recovered}` for the
/// reference key; `q = 0` sends exact outputs.
pub fn sync_profile_json(q: u32, seed: u64, len: usize) -> Result<String, String> {
    let key = ObserverKey::reference();
    let x0 = seeded_state(key.group(), seed).map_err(|e| e.to_string())?;
    let xhat0 = tilechaos::codec::default_estimate::<Rational>(&key).map_err(|e| e.to_string())?;
    let rows = error_profile(&key, &MixingCodec::plain(3), &seeded_bytes(len, seed), &x0, &xhat0, mode(q))
        .map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&rows).expect("rows serialize"))
}

/// Frames for `text` under the reference key.
pub fn mask_text(text: &str, q: u32, seed: u64) -> Result<String, String> {
    let key = ObserverKey::reference();
    let x0 = seeded_state(key.group(), seed).map_err(|e| e.to_string())?;
    let frames = transmit(&key, &MixingCodec::plain(3), text.as_bytes(), &x0, mode(q)).map_err(|e| e.to_string())?;
    Ok(frames_to_text(&frames))
}

/// Inverse of [`mask_text`]; invalid UTF-8 is replaced.
pub fn unmask_text(frames: &str) -> Result<String, String> {
    let key = ObserverKey::reference();
    let frames = frames_from_text(frames).map_err(|e| e.to_string())?;
    let xhat0 = tilechaos::codec::default_estimate::<Rational>(&key).map_err(|e| e.to_string())?;
    let bytes = receive(&key, &MixingCodec::plain(3), &frames, &xhat0).map_err(|e| e.to_string())?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen]
pub fn orbit(a: &str, b: &str, group: &str, seed: u64, steps: usize) -> Result<Vec<f64>, JsError> {
    orbit_points(a, b, group, seed, steps).map_err(js)
}

#[wasm_bindgen]
pub fn sync_profile(q: u32, seed: u64, len: usize) -> Result<String, JsError> {
    sync_profile_json(q, seed, len).map_err(js)
}

#[wasm_bindgen]
pub fn mask(text: &str, q: u32, seed: u64) -> Result<String, JsError> {
    mask_text(text, q, seed).map_err(js)
}

#[wasm_bindgen]
pub fn unmask(frames: &str) -> Result<String, JsError> {
    unmask_text(frames).map_err(js)
}
