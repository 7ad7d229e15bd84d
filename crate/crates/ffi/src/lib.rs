//! C ABI for noiseforms.
//!
//! Channels and generators cross the boundary as opaque handles. Every call returns an
//! [`NfStatus`]; on failure the message is available from [`nf_last_error`] until the next
//! call on the same thread. Strings returned by the library are freed with [`nf_string_free`].

use noiseforms::channel::{jamiolkowski_fidelity, trace_distance, ChoiJson, ChoiState};
use noiseforms::error::Error;
use noiseforms::forms::{cnot_to_phase_frame, phase_frame_to_cnot};
use noiseforms::linalg::{ComplexMatrix, TensorShape, C64};
use noiseforms::lindblad::{GeneratorJson, LindbladGenerator};
use noiseforms::sacrifice::{
    cnot_sacrifice, identity_channel_sacrifice, phase_gate_sacrifice, swap_sacrifice,
};
use noiseforms::twirl::{named_set, twirl};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NfStatus {
    Ok = 0,
    NullPointer = 1,
    Dimension = 2,
    Validation = 3,
    NotCp = 4,
    NotTp = 5,
    Pattern = 6,
    Infeasible = 7,
    Json = 8,
    Utf8 = 9,
    Panic = 10,
}

/// Opaque channel handle.
pub struct NfChannel {
    inner: ChoiState,
}

/// Opaque Lindblad generator handle.
pub struct NfGenerator {
    inner: LindbladGenerator,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

impl From<&Error> for NfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Dimension(_) => NfStatus::Dimension,
            Error::Validation(_) => NfStatus::Validation,
            Error::NotCp { .. } => NfStatus::NotCp,
            Error::NotTp { .. } => NfStatus::NotTp,
            Error::Pattern { .. } => NfStatus::Pattern,
            Error::Infeasible(_) => NfStatus::Infeasible,
        }
    }
}

struct Failure(NfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(NfStatus::from(&e), e.to_string())
    }
}

fn null() -> Failure {
    Failure(NfStatus::NullPointer, "null pointer argument".into())
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NfStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NfStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(NfStatus::Utf8, e.to_string()))
}

unsafe fn channel<'a>(h: *const NfChannel) -> Result<&'a ChoiState, Failure> {
    h.as_ref().map(|c| &c.inner).ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn boxed(e: ChoiState) -> *mut NfChannel {
    Box::into_raw(Box::new(NfChannel { inner: e }))
}

/// Message of the last failed call on this thread; empty after a success. Owned by the library.
#[no_mangle]
pub extern "C" fn nf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn nf_status_name(status: NfStatus) -> *const c_char {
    let s: &'static CStr = match status {
        NfStatus::Ok => c"ok",
        NfStatus::NullPointer => c"null_pointer",
        NfStatus::Dimension => c"dimension",
        NfStatus::Validation => c"validation",
        NfStatus::NotCp => c"not_cp",
        NfStatus::NotTp => c"not_tp",
        NfStatus::Pattern => c"pattern",
        NfStatus::Infeasible => c"infeasible",
        NfStatus::Json => c"json",
        NfStatus::Utf8 => c"utf8",
        NfStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn nf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a channel from its JSON form `{"in_dims","out_dims","choi_re","choi_im"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nf_channel_from_json(
    json: *const c_char,
    out: *mut *mut NfChannel,
) -> NfStatus {
    guard(|| {
        let text = read_str(json)?;
        let j: ChoiJson =
            serde_json::from_str(text).map_err(|e| Failure(NfStatus::Json, e.to_string()))?;
        let e = ChoiState::try_from(j)?;
        put(out, boxed(e))
    })
}

/// Builds a channel from row-major real and imaginary parts of its (d_in·d_out)² Choi matrix.
///
/// # Safety
/// `re` and `im` must hold `(Π in_dims · Π out_dims)²` doubles; dims arrays their stated lengths.
#[no_mangle]
pub unsafe extern "C" fn nf_channel_from_parts(
    re: *const f64,
    im: *const f64,
    in_dims: *const usize,
    n_in: usize,
    out_dims: *const usize,
    n_out: usize,
    out: *mut *mut NfChannel,
) -> NfStatus {
    guard(|| {
        if re.is_null() || im.is_null() || in_dims.is_null() || out_dims.is_null() {
            return Err(null());
        }
        let in_shape = TensorShape::new(std::slice::from_raw_parts(in_dims, n_in).to_vec())?;
        let out_shape = TensorShape::new(std::slice::from_raw_parts(out_dims, n_out).to_vec())?;
        let n = in_shape.total() * out_shape.total();
        let re = std::slice::from_raw_parts(re, n * n);
        let im = std::slice::from_raw_parts(im, n * n);
        let m = ComplexMatrix::from_vec(
            n,
            n,
            re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect(),
        )?;
        put(out, boxed(ChoiState::new(m, in_shape, out_shape)?))
    })
}

/// # Safety
/// `h` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nf_channel_free(h: *mut NfChannel) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// JSON form of a channel with 17 significant digits; free with [`nf_string_free`].
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nf_channel_to_json(
    h: *const NfChannel,
    out: *mut *mut c_char,
) -> NfStatus {
    guard(|| {
        let e = channel(h)?;
        let s = noiseforms::cli::to_json_string(&ChoiJson::from(e));
        let s = CString::new(s.trim_end()).map_err(|e| Failure(NfStatus::Json, e.to_string()))?;
        put(out, s.into_raw())
    })
}

/// Total input and output dimensions.
///
/// # Safety
/// `h` must be a live handle; `d_in` and `d_out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn nf_channel_dims(
    h: *const NfChannel,
    d_in: *mut usize,
    d_out: *mut usize,
) -> NfStatus {
    guard(|| {
        let e = channel(h)?;
        put(d_in, e.d_in())?;
        put(d_out, e.d_out())
    })
}

/// Copies the Choi matrix (row-major) into caller buffers of `len` doubles each.
///
/// # Safety
/// `re` and `im` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nf_channel_matrix(
    h: *const NfChannel,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> NfStatus {
    guard(|| {
        let e = channel(h)?;
        if re.is_null() || im.is_null() {
            return Err(null());
        }
        let data = e.matrix().data();
        if len < data.len() {
            return Err(Failure(
                NfStatus::Dimension,
                format!("buffer holds {len} entries, need {}", data.len()),
            ));
        }
        for (i, z) in data.iter().enumerate() {
            *re.add(i) = z.re;
            *im.add(i) = z.im;
        }
        Ok(())
    })
}

/// Complete positivity and trace preservation at the library tolerances.
///
/// # Safety
/// `h` must be a live handle; `cp` and `tp` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn nf_channel_validate(
    h: *const NfChannel,
    cp: *mut bool,
    tp: *mut bool,
) -> NfStatus {
    guard(|| {
        let r = channel(h)?.validate();
        put(cp, r.cp)?;
        put(tp, r.tp)
    })
}

/// Fidelity ⟨Φ|E|Φ⟩ with the identity channel.
///
/// # Safety
/// `h` must be a live handle and `f` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nf_channel_fidelity_identity(
    h: *const NfChannel,
    f: *mut f64,
) -> NfStatus {
    guard(|| {
        let e = channel(h)?;
        if e.d_in() != e.d_out() {
            return Err(Failure(
                NfStatus::Dimension,
                "identity fidelity needs d_in = d_out".into(),
            ));
        }
        put(
            f,
            jamiolkowski_fidelity(e, &ComplexMatrix::identity(e.d_in()))?,
        )
    })
}

/// Trace distance ½‖E − F‖₁ between two Choi states.
///
/// # Safety
/// `a`, `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nf_trace_distance(
    a: *const NfChannel,
    b: *const NfChannel,
    out: *mut f64,
) -> NfStatus {
    guard(|| put(out, trace_distance(channel(a)?, channel(b)?)?))
}

/// Twirls over a built-in set: `pauli`, `depolarizing`, `phase-gate`, `cnot`, `swap`.
///
/// # Safety
/// `h` must be a live handle, `set` a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nf_twirl(
    h: *const NfChannel,
    set: *const c_char,
    out: *mut *mut NfChannel,
) -> NfStatus {
    guard(|| {
        let e = channel(h)?;
        let set = named_set(read_str(set)?, e.in_shape())?;
        put(out, boxed(twirl(e, &set)?))
    })
}

/// Sacrifices fidelity until the output is ideal gate plus global white noise.
/// `gate` is `identity`, `swap`, `cnot` or `phase`; `alpha` is read only for `phase`.
///
/// # Safety
/// `h` must be a live handle, `gate` a NUL-terminated string; `out` and `fidelity` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn nf_sacrifice(
    h: *const NfChannel,
    gate: *const c_char,
    alpha: f64,
    out: *mut *mut NfChannel,
    fidelity: *mut f64,
) -> NfStatus {
    guard(|| {
        let e = channel(h)?;
        let (result, output) = match read_str(gate)? {
            "identity" => {
                let r = identity_channel_sacrifice(e)?;
                let o = r.output.clone();
                (r, o)
            }
            "swap" => {
                let r = swap_sacrifice(e)?;
                let o = r.output.clone();
                (r, o)
            }
            "cnot" => {
                let r = cnot_sacrifice(&cnot_to_phase_frame(e)?)?;
                let o = r.output.as_ref().map(phase_frame_to_cnot).transpose()?;
                (r, o)
            }
            "phase" => {
                let r = phase_gate_sacrifice(e, alpha)?;
                let o = r.output.clone();
                (r, o)
            }
            other => {
                return Err(Failure(
                    NfStatus::Validation,
                    format!("unknown gate '{other}'"),
                ))
            }
        };
        let output = output
            .ok_or_else(|| Failure(NfStatus::Validation, "protocol produced no channel".into()))?;
        put(fidelity, result.achieved_fidelity)?;
        put(out, boxed(output))
    })
}

/// Parses a generator from `{"H_re","H_im","Hl_re","Hl_im","gks_re","gks_im","basis"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nf_generator_from_json(
    json: *const c_char,
    out: *mut *mut NfGenerator,
) -> NfStatus {
    guard(|| {
        let j: GeneratorJson = serde_json::from_str(read_str(json)?)
            .map_err(|e| Failure(NfStatus::Json, e.to_string()))?;
        let g = LindbladGenerator::try_from(j)?;
        put(out, Box::into_raw(Box::new(NfGenerator { inner: g })))
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nf_generator_free(g: *mut NfGenerator) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Channel e^{𝒵t}.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nf_generator_evolve(
    g: *const NfGenerator,
    t: f64,
    out: *mut *mut NfChannel,
) -> NfStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(null)?;
        put(out, boxed(g.inner.evolve(t)?))
    })
}
