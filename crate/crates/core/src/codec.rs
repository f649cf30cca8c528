//! Byte embedding, channel truncation, and the masking pipeline built on the
//! drive/observer pair.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{dot_int, format_rational, parse_rational, Rational, Scalar};
use crate::sync::{drive_step, observer_coast, observer_step, recover_input, resync_step, ObserverKey};

pub type PlainSymbol = u8;

/// Ciphertext value `u ∈ [0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CipherSymbol<S>(S);

impl<S: Scalar> CipherSymbol<S> {
    pub fn new(u: S) -> Result<Self> {
        let one = S::from_int(1);
        if u.sign(false) == std::cmp::Ordering::Less || u >= one {
            return Err(Error::InvalidArgument(format!("cipher symbol {u:?} outside [0, 1)")));
        }
        Ok(CipherSymbol(u))
    }

    pub fn value(&self) -> &S {
        &self.0
    }

    pub fn into_inner(self) -> S {
        self.0
    }
}

/// Reversible mixing of a byte with the current state.
pub trait Codec {
    fn embed<S: Scalar>(&self, x: &[S], m: PlainSymbol) -> CipherSymbol<S>;
    fn extract<S: Scalar>(&self, x: &[S], u: &S) -> PlainSymbol;
}

/// `u = frac(m/256 + frac(w·X))`, inverted by rounding `256·frac(u − frac(w·X))`.
///
/// Rounding tolerates an error in `u` below `1/512`. A nonzero `w` also
/// carries the observer's state error into the recovered byte.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixingCodec {
    w: Vec<i128>,
}

impl MixingCodec {
    pub fn new(w: Vec<i128>) -> Self {
        MixingCodec { w }
    }

    /// `w = 0`: the byte is sent as `m/256`.
    pub fn plain(n: usize) -> Self {
        MixingCodec { w: vec![0; n] }
    }

    pub fn w(&self) -> &[i128] {
        &self.w
    }

    fn mask<S: Scalar>(&self, x: &[S]) -> S {
        if self.w.iter().all(|&c| c == 0) {
            S::zero()
        } else {
            dot_int(&self.w, x).frac()
        }
    }
}

impl Codec for MixingCodec {
    fn embed<S: Scalar>(&self, x: &[S], m: PlainSymbol) -> CipherSymbol<S> {
        let base = S::from_rational(&Rational::new(BigInt::from(m), BigInt::from(256)));
        CipherSymbol((base + self.mask(x)).frac())
    }

    fn extract<S: Scalar>(&self, x: &[S], u: &S) -> PlainSymbol {
        let half = S::from_rational(&Rational::new(BigInt::from(1), BigInt::from(2)));
        let scaled = (u.clone() - self.mask(x)).frac().mul_int(256) + half;
        let code = scaled.floor().to_f64() as i64;
        code.rem_euclid(256) as u8
    }
}

/// How `Y_k` crosses the channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelMode {
    /// The exact value of `Y_k`.
    Exact,
    /// `⌊Y_k·10^q⌋`
    Digits(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameValue {
    Digits { q: u32, scaled: i128 },
    Exact(Rational),
}

/// One transmitted output sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelFrame {
    pub k: usize,
    pub value: FrameValue,
}

impl ChannelFrame {
    /// `Y_trunc = scaled / 10^q`, or the exact value.
    pub fn rational(&self) -> Rational {
        match &self.value {
            FrameValue::Digits { q, scaled } => {
                Rational::new(BigInt::from(*scaled), BigInt::from(10u32).pow(*q))
            }
            FrameValue::Exact(r) => r.clone(),
        }
    }

    pub fn value_as<S: Scalar>(&self) -> S {
        S::from_rational(&self.rational())
    }

    pub fn digits(&self) -> Option<u32> {
        match self.value {
            FrameValue::Digits { q, .. } => Some(q),
            FrameValue::Exact(_) => None,
        }
    }
}

impl fmt::Display for ChannelFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            FrameValue::Digits { q, scaled } => write!(f, "k:{} q:{} y:{}", self.k, q, scaled),
            FrameValue::Exact(r) => write!(f, "k:{} y:{}", self.k, format_rational(r)),
        }
    }
}

impl FromStr for ChannelFrame {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("frame `{line}`: {why}"));
        let mut k = None;
        let mut q = None;
        let mut y = None;
        for field in line.split_whitespace() {
            let (name, val) = field.split_once(':').ok_or_else(|| bad("expected name:value fields"))?;
            let slot = match name {
                "k" => &mut k,
                "q" => &mut q,
                "y" => &mut y,
                _ => return Err(bad("unknown field")),
            };
            if slot.replace(val).is_some() {
                return Err(bad("repeated field"));
            }
        }
        let k: usize = k.ok_or_else(|| bad("missing k"))?.parse().map_err(|_| bad("k is not an index"))?;
        let y = y.ok_or_else(|| bad("missing y"))?;
        let value = match q {
            Some(q) => {
                let q: u32 = q.parse().map_err(|_| bad("q is not a digit count"))?;
                let scaled: i128 = y.parse().map_err(|_| bad("y is not an integer"))?;
                FrameValue::Digits { q, scaled }
            }
            None => FrameValue::Exact(parse_rational(y)?),
        };
        Ok(ChannelFrame { k, value })
    }
}

/// `⌊Y·10^q⌋`, computed on the exact value of `Y`.
pub fn truncate_output<S: Scalar>(y: &S, q: u32) -> Result<i128> {
    if q == 0 {
        return Err(Error::InvalidArgument("digit count must be at least 1".into()));
    }
    let exact = y.to_exact().ok_or_else(|| Error::InvalidArgument(format!("non-finite output {y:?}")))?;
    let scaled = (exact * Rational::from_integer(BigInt::from(10u32).pow(q))).floor();
    scaled
        .to_integer()
        .to_i128()
        .ok_or_else(|| Error::InvalidArgument("scaled output overflows".into()))
}

pub fn make_frame<S: Scalar>(k: usize, y: &S, mode: ChannelMode) -> Result<ChannelFrame> {
    let value = match mode {
        ChannelMode::Exact => FrameValue::Exact(
            y.to_exact().ok_or_else(|| Error::InvalidArgument(format!("non-finite output {y:?}")))?,
        ),
        ChannelMode::Digits(q) => FrameValue::Digits { q, scaled: truncate_output(y, q)? },
    };
    Ok(ChannelFrame { k, value })
}

/// Number of zero-input frames sent before the payload.
pub fn warmup_len(key: &ObserverKey) -> usize {
    key.n() + 1
}

/// Runs the drive system over `n + 1` warm-up steps and then one step per
/// byte, emitting one frame per step.
pub fn transmit<S: Scalar, C: Codec>(
    key: &ObserverKey,
    codec: &C,
    plaintext: &[u8],
    x0: &[S],
    mode: ChannelMode,
) -> Result<Vec<ChannelFrame>> {
    let warm = warmup_len(key);
    let mut x = x0.to_vec();
    let mut frames = Vec::with_capacity(warm + plaintext.len());
    for k in 0..warm + plaintext.len() {
        let u = if k < warm { S::zero() } else { codec.embed(&x, plaintext[k - warm]).into_inner() };
        let (next, y) = drive_step(key, &x, &u, k)?;
        frames.push(make_frame(k, &y, mode)?);
        x = next;
    }
    Ok(frames)
}

fn check_digits(frames: &[ChannelFrame]) -> Result<()> {
    if let Some(first) = frames.first() {
        let q = first.digits();
        if frames.iter().any(|f| f.digits() != q) {
            return Err(Error::InvalidArgument("frames mix different channel modes".into()));
        }
    }
    Ok(())
}

/// Recovers the payload from a gap-free frame sequence starting at `k = 0`.
pub fn receive<S: Scalar, C: Codec>(
    key: &ObserverKey,
    codec: &C,
    frames: &[ChannelFrame],
    xhat0: &[S],
) -> Result<Vec<u8>> {
    check_digits(frames)?;
    let warm = warmup_len(key);
    let mut xhat = xhat0.to_vec();
    let mut out = Vec::with_capacity(frames.len().saturating_sub(warm));
    for (k, frame) in frames.iter().enumerate() {
        if frame.k != k {
            return Err(Error::FrameGap { k });
        }
        let y: S = frame.value_as();
        let (next, yhat) = observer_step(key, &xhat, &y, k)?;
        if k >= warm {
            let u = recover_input(key, &y, &yhat, k)?;
            out.push(codec.extract(&xhat, &u));
        }
        xhat = next;
    }
    Ok(out)
}

/// Payload recovered from a frame sequence that may have gaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reception {
    /// One byte per payload step up to the last received frame; lost
    /// positions hold 0.
    pub payload: Vec<u8>,
    /// Payload indices that were missing or decoded before resynchronizing.
    pub lost: Vec<usize>,
}

/// Like [`receive`], but coasts the observer through missing frames and
/// marks every symbol until it has resynchronized.
pub fn receive_lossy<S: Scalar, C: Codec>(
    key: &ObserverKey,
    codec: &C,
    frames: &[ChannelFrame],
    xhat0: &[S],
) -> Result<Reception> {
    check_digits(frames)?;
    if frames.windows(2).any(|w| w[0].k >= w[1].k) {
        return Err(Error::InvalidArgument("frame indices must increase".into()));
    }
    let warm = warmup_len(key);
    let Some(last) = frames.last().map(|f| f.k) else {
        return Ok(Reception { payload: Vec::new(), lost: Vec::new() });
    };
    let mut xhat = xhat0.to_vec();
    let mut frames = frames.iter().peekable();
    let mut synced_from = warm;
    let mut payload = Vec::new();
    let mut lost = Vec::new();
    for k in 0..=last {
        let frame = frames.next_if(|f| f.k == k);
        match frame {
            Some(frame) => {
                let y: S = frame.value_as();
                let (next, yhat) = observer_step(key, &xhat, &y, k)?;
                if k >= warm {
                    let u = y - yhat;
                    payload.push(codec.extract(&xhat, &u));
                    if k < synced_from {
                        lost.push(k - warm);
                    }
                }
                xhat = next;
            }
            None => {
                xhat = observer_coast(key, &xhat, k)?;
                synced_from = synced_from.max(resync_step(key, k));
                if k >= warm {
                    payload.push(0);
                    lost.push(k - warm);
                }
            }
        }
    }
    Ok(Reception { payload, lost })
}

/// One step of a side-by-side drive/observer run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub k: usize,
    /// `d(X_k, X̂_k)` in `R^N / G'`
    pub state_error: f64,
    /// `u_k − û_k` reduced to `[-1/2, 1/2)`, with `û_k = Y_k − Ŷ_k` read
    /// from the channel value
    pub input_error: f64,
    pub sent: Option<u8>,
    pub recovered: Option<u8>,
}

/// Per-step state and input errors for a masked transmission.
pub fn error_profile<S: Scalar, C: Codec>(
    key: &ObserverKey,
    codec: &C,
    plaintext: &[u8],
    x0: &[S],
    xhat0: &[S],
    mode: ChannelMode,
) -> Result<Vec<ProfileRow>> {
    let warm = warmup_len(key);
    let lattice = key.group().translation_subgroup();
    let mut x = x0.to_vec();
    let mut xhat = xhat0.to_vec();
    let mut rows = Vec::with_capacity(warm + plaintext.len());
    for k in 0..warm + plaintext.len() {
        let sent = (k >= warm).then(|| plaintext[k - warm]);
        let u = match sent {
            Some(m) => codec.embed(&x, m).into_inner(),
            None => S::zero(),
        };
        let (x_next, y) = drive_step(key, &x, &u, k)?;
        let y_channel: S = make_frame(k, &y, mode)?.value_as();
        let (xhat_next, yhat) = observer_step(key, &xhat, &y_channel, k)?;
        let uhat = y_channel - yhat;
        let diff = (u - uhat.clone()).to_f64();
        rows.push(ProfileRow {
            k,
            state_error: lattice.orbit_distance(&x, &xhat),
            input_error: diff - diff.round(),
            sent,
            recovered: sent.map(|_| codec.extract(&xhat, &uhat)),
        });
        x = x_next;
        xhat = xhat_next;
    }
    Ok(rows)
}

/// Byte errors per digit count and the smallest `q*` from which every
/// larger tested count is error-free.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DigitSweep {
    pub errors: Vec<(u32, usize)>,
    pub q_star: Option<u32>,
}

/// Transmits and receives `plaintext` once per digit count, in exact
/// arithmetic on both ends.
pub fn digit_sweep<C: Codec>(
    key: &ObserverKey,
    codec: &C,
    plaintext: &[u8],
    x0: &[Rational],
    xhat0: &[Rational],
    digits: impl IntoIterator<Item = u32>,
) -> Result<DigitSweep> {
    let mut errors = Vec::new();
    for q in digits {
        let frames = transmit(key, codec, plaintext, x0, ChannelMode::Digits(q))?;
        let got = receive(key, codec, &frames, xhat0)?;
        let wrong = got.iter().zip(plaintext).filter(|(a, b)| a != b).count();
        errors.push((q, wrong));
    }
    let mut q_star = None;
    for &(q, wrong) in errors.iter().rev() {
        if wrong != 0 {
            break;
        }
        q_star = Some(q);
    }
    Ok(DigitSweep { errors, q_star })
}

/// A starting estimate inside the fundamental domain: the projection of 0.
pub fn default_estimate<S: Scalar>(key: &ObserverKey) -> Result<Vec<S>> {
    key.group().project_full(&vec![S::zero(); key.n()])
}
