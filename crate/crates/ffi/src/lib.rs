//! C ABI for the crftiw library.
//!
//! Every function returns a [`CrftiwStatus`]; on failure the message is available
//! through [`crftiw_last_error`] on the same thread. Fitted models are opaque
//! handles released with their `_free` function. Matrices are row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use ndarray::Array2;

use crftiw::evaluate::ari;
use crftiw::npmix::{fit_mixture, map_assign, select_l, MixtureModel, MixtureOptions, Posteriors};
use crftiw::sindex::{
    fit_gamma, fit_gamma_constrained, residuals, Covariates, IndexFit, IndexOptions,
};
use crftiw::wavelet::{featurize_ti, parseval_check, tidwt_forward, Curve, WaveletFilter};
use crftiw::Error;

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrftiwStatus {
    Ok = 0,
    NullPointer = 1,
    /// An output buffer is too small or an argument is out of range.
    InvalidArgument = 2,
    Wavelet = 3,
    Regression = 4,
    Mixture = 5,
    Evaluation = 6,
    Io = 7,
    /// A Rust panic was caught at the boundary.
    Internal = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CrftiwStatus {
    use Error::*;
    match e {
        NonDyadicLength(_)
        | NonFiniteInput(_)
        | InvalidLevels { .. }
        | InconsistentPyramid(_)
        | DegenerateScale(_)
        | ZeroNormCurve
        | UnknownWavelet(_) => CrftiwStatus::Wavelet,
        EmptyInput(_)
        | DimensionMismatch(_)
        | DegenerateCovariates(_)
        | EmptyNeighborhood(_)
        | OptimizerFailure
        | NonPositiveEffect(_)
        | InvalidConstraint(_) => CrftiwStatus::Regression,
        GridMismatch(_)
        | EmptyComponent(_)
        | InvalidL { .. }
        | TooFewValues(_)
        | InvalidBandwidth(_) => CrftiwStatus::Mixture,
        InvalidScenario(_) | InvalidConfig(_) | LengthMismatch(..) | EmptyCluster(_) => {
            CrftiwStatus::Evaluation
        }
        EmptySeries | NonPositivePopulation(_) | Io(_) | Parse(_) => CrftiwStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Argument(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Outcome + UnwindSafe) -> CrftiwStatus {
    match catch_unwind(body) {
        Ok(Ok(())) => CrftiwStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            CrftiwStatus::NullPointer
        }
        Ok(Err(Failure::Argument(msg))) => {
            set_error(msg);
            CrftiwStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            CrftiwStatus::Internal
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(
    p: *mut T,
    len: usize,
    what: &'static str,
) -> Result<&'a mut [T], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn matrix(
    p: *const f64,
    rows: usize,
    cols: usize,
    what: &'static str,
) -> Result<Array2<f64>, Failure> {
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| Failure::Argument(format!("{what}: dimensions overflow")))?;
    let data = slice(p, len, what)?;
    Ok(Array2::from_shape_vec((rows, cols), data.to_vec()).expect("length checked"))
}

unsafe fn filter(name: *const c_char) -> Result<WaveletFilter, Failure> {
    if name.is_null() {
        return Ok(WaveletFilter::default());
    }
    let s = CStr::from_ptr(name)
        .to_str()
        .map_err(|_| Failure::Argument("wavelet name is not UTF-8".into()))?;
    Ok(WaveletFilter::by_name(s)?)
}

fn copy_into(src: &[f64], dst: &mut [f64], what: &str) -> Outcome {
    if dst.len() < src.len() {
        return Err(Failure::Argument(format!(
            "{what}: buffer holds {} values, {} needed",
            dst.len(),
            src.len()
        )));
    }
    dst[..src.len()].copy_from_slice(src);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn crftiw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Translation-invariant log-energy features of one curve of dyadic length `len`.
///
/// Writes `log2(len) + 1` values to `out` (capacity `out_cap`) and their count
/// to `written`. `wavelet` may be NULL for the default Symmlet 8.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn crftiw_featurize_ti(
    values: *const f64,
    len: usize,
    wavelet: *const c_char,
    out: *mut f64,
    out_cap: usize,
    written: *mut usize,
) -> CrftiwStatus {
    guard(|| {
        let curve = Curve::new(slice(values, len, "values")?.to_vec())?;
        let features = featurize_ti(&curve, &filter(wavelet)?)?;
        copy_into(&features, slice_mut(out, out_cap, "out")?, "features")?;
        *self::out(written, "written")? = features.len();
        Ok(())
    })
}

/// Relative deviation of the weighted transform energy from the curve energy.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn crftiw_parseval_error(
    values: *const f64,
    len: usize,
    wavelet: *const c_char,
    error: *mut f64,
) -> CrftiwStatus {
    guard(|| {
        let curve = Curve::new(slice(values, len, "values")?.to_vec())?;
        let coeffs = tidwt_forward(&curve, &filter(wavelet)?)?;
        *out(error, "error")? = parseval_check(&curve, &coeffs)?;
        Ok(())
    })
}

/// Adjusted Rand index of two labellings of `n` items.
///
/// # Safety
/// Pointers must be valid for `n` elements.
#[no_mangle]
pub unsafe extern "C" fn crftiw_ari(
    first: *const usize,
    second: *const usize,
    n: usize,
    index: *mut f64,
) -> CrftiwStatus {
    guard(|| {
        *out(index, "index")? = ari(slice(first, n, "first")?, slice(second, n, "second")?)?;
        Ok(())
    })
}

/// Elbow choice among `L = 1..=len` given the smoothed log-likelihoods.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn crftiw_select_l(
    loglik: *const f64,
    len: usize,
    tau: f64,
    selected: *mut usize,
) -> CrftiwStatus {
    guard(|| {
        *out(selected, "selected")? = select_l(slice(loglik, len, "loglik")?, tau)?;
        Ok(())
    })
}

/// Fitted single-index regression.
pub struct CrftiwIndexFit {
    fit: IndexFit,
    residuals: Array2<f64>,
}

/// Regresses the `n x p` features on the `n x d` covariates.
///
/// `zero_index` < 0 fits freely; otherwise that coefficient is held at zero.
///
/// # Safety
/// Matrices must hold `n * p` and `n * d` values; `fit` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crftiw_index_fit(
    features: *const f64,
    n: usize,
    p: usize,
    covariates: *const f64,
    d: usize,
    zero_index: i64,
    seed: u64,
    fit: *mut *mut CrftiwIndexFit,
) -> CrftiwStatus {
    guard(|| {
        let slot = out(fit, "fit")?;
        *slot = ptr::null_mut();
        let y = matrix(features, n, p, "features")?;
        let cov = Covariates::from_matrix(matrix(covariates, n, d, "covariates")?)?;
        let opts = IndexOptions {
            seed,
            ..IndexOptions::default()
        };
        let fitted = if zero_index < 0 {
            fit_gamma(&y, &cov, &opts)?
        } else {
            fit_gamma_constrained(&y, &cov, &opts, zero_index as usize)?
        };
        let residuals = residuals(&fitted)?;
        *slot = Box::into_raw(Box::new(CrftiwIndexFit {
            fit: fitted,
            residuals,
        }));
        Ok(())
    })
}

/// Copies the unit index direction (`d` values).
///
/// # Safety
/// `fit` must come from [`crftiw_index_fit`]; `out` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn crftiw_index_fit_gamma(
    fit: *const CrftiwIndexFit,
    out: *mut f64,
    cap: usize,
) -> CrftiwStatus {
    guard(|| {
        let fit = fit.as_ref().ok_or(Failure::Null("fit"))?;
        copy_into(fit.fit.gamma(), slice_mut(out, cap, "out")?, "gamma")
    })
}

/// Copies the `n x p` residual matrix, row-major.
///
/// # Safety
/// `fit` must come from [`crftiw_index_fit`]; `out` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn crftiw_index_fit_residuals(
    fit: *const CrftiwIndexFit,
    out: *mut f64,
    cap: usize,
) -> CrftiwStatus {
    guard(|| {
        let fit = fit.as_ref().ok_or(Failure::Null("fit"))?;
        let flat: Vec<f64> = fit.residuals.iter().copied().collect();
        copy_into(&flat, slice_mut(out, cap, "out")?, "residuals")
    })
}

/// Profile loss at the fitted direction.
///
/// # Safety
/// `fit` must come from [`crftiw_index_fit`].
#[no_mangle]
pub unsafe extern "C" fn crftiw_index_fit_loss(
    fit: *const CrftiwIndexFit,
    loss: *mut f64,
) -> CrftiwStatus {
    guard(|| {
        let fit = fit.as_ref().ok_or(Failure::Null("fit"))?;
        *out(loss, "loss")? = fit.fit.loss();
        Ok(())
    })
}

/// Releases a regression handle. NULL is ignored.
///
/// # Safety
/// `fit` must come from [`crftiw_index_fit`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn crftiw_index_fit_free(fit: *mut CrftiwIndexFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Fitted nonparametric mixture.
pub struct CrftiwMixture {
    model: MixtureModel,
    posteriors: Posteriors,
}

/// Fits an `l`-component mixture to the `n x p` residual matrix.
///
/// # Safety
/// `residuals` must hold `n * p` values; `mixture` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crftiw_mixture_fit(
    residuals: *const f64,
    n: usize,
    p: usize,
    l: usize,
    seed: u64,
    mixture: *mut *mut CrftiwMixture,
) -> CrftiwStatus {
    guard(|| {
        let slot = out(mixture, "mixture")?;
        *slot = ptr::null_mut();
        let data = matrix(residuals, n, p, "residuals")?;
        let opts = MixtureOptions {
            seed,
            ..MixtureOptions::default()
        };
        let (model, posteriors) = fit_mixture(&data, l, &opts)?;
        *slot = Box::into_raw(Box::new(CrftiwMixture { model, posteriors }));
        Ok(())
    })
}

/// Maximized smoothed log-likelihood.
///
/// # Safety
/// `mixture` must come from [`crftiw_mixture_fit`].
#[no_mangle]
pub unsafe extern "C" fn crftiw_mixture_loglik(
    mixture: *const CrftiwMixture,
    loglik: *mut f64,
) -> CrftiwStatus {
    guard(|| {
        let m = mixture.as_ref().ok_or(Failure::Null("mixture"))?;
        *out(loglik, "loglik")? = m.model.loglik;
        Ok(())
    })
}

/// Copies the `n x l` posterior probabilities, row-major.
///
/// # Safety
/// `mixture` must come from [`crftiw_mixture_fit`]; `out` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn crftiw_mixture_posteriors(
    mixture: *const CrftiwMixture,
    out: *mut f64,
    cap: usize,
) -> CrftiwStatus {
    guard(|| {
        let m = mixture.as_ref().ok_or(Failure::Null("mixture"))?;
        let flat: Vec<f64> = m.posteriors.matrix().iter().copied().collect();
        copy_into(&flat, slice_mut(out, cap, "out")?, "posteriors")
    })
}

/// Writes the maximum a posteriori labels (`1..=l`) of the `n` rows.
///
/// # Safety
/// `mixture` must come from [`crftiw_mixture_fit`]; `out` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn crftiw_mixture_labels(
    mixture: *const CrftiwMixture,
    out: *mut usize,
    cap: usize,
) -> CrftiwStatus {
    guard(|| {
        let m = mixture.as_ref().ok_or(Failure::Null("mixture"))?;
        let labels = map_assign(&m.posteriors).0;
        let dst = slice_mut(out, cap, "out")?;
        if dst.len() < labels.len() {
            return Err(Failure::Argument(format!(
                "labels: buffer holds {} values, {} needed",
                dst.len(),
                labels.len()
            )));
        }
        dst[..labels.len()].copy_from_slice(&labels);
        Ok(())
    })
}

/// Releases a mixture handle. NULL is ignored.
///
/// # Safety
/// `mixture` must come from [`crftiw_mixture_fit`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn crftiw_mixture_free(mixture: *mut CrftiwMixture) {
    if !mixture.is_null() {
        drop(Box::from_raw(mixture));
    }
}
