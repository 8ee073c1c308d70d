//! C ABI over `edsa-core`.
//!
//! Every object crosses the boundary as an opaque pointer created by an
//! `edsa_*_new`/constructor function and released with the matching
//! `edsa_*_free`. Fallible calls return an [`EdsaStatus`]; on failure the
//! message is available from [`edsa_last_error`] on the same thread.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and must be released with [`edsa_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use edsa_core::ledger::{KeyRing, Ledger, LedgerConfig, LedgerTx, TxPayload};
use edsa_core::model::{ActorId, DataType};
use edsa_core::pricing::{PriceLedger, PriceRecord, PricingError, Window};
use edsa_core::scenario::Scenario;
use edsa_core::solver::{solve_exact, solve_greedy, ExactLimits, SolveReport};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdsaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    SolveFailed = 4,
    Rejected = 5,
    NoData = 6,
    Panic = 7,
}

pub struct EdsaScenario(Scenario);
pub struct EdsaReport(SolveReport);
pub struct EdsaLedger(Ledger);
pub struct EdsaPrices(PriceLedger);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl ToString) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: EdsaStatus, msg: impl ToString) -> EdsaStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> EdsaStatus) -> EdsaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(EdsaStatus::Panic, "internal panic"))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, EdsaStatus> {
    if p.is_null() {
        return Err(fail(EdsaStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(EdsaStatus::InvalidUtf8, e))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> EdsaStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            EdsaStatus::Ok
        }
        Err(e) => fail(EdsaStatus::InvalidInput, e),
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(EdsaStatus::NullArgument, concat!("null argument: ", stringify!($p)));
        })+
    };
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn edsa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn edsa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a TOML scenario.
///
/// # Safety
/// `toml` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn edsa_scenario_from_toml(toml: *const c_char, out: *mut *mut EdsaScenario) -> EdsaStatus {
    guard(|| {
        non_null!(out);
        let s = try_status!(text(toml));
        match Scenario::from_toml_str(s) {
            Ok(sc) => {
                *out = Box::into_raw(Box::new(EdsaScenario(sc)));
                EdsaStatus::Ok
            }
            Err(e) => fail(EdsaStatus::InvalidInput, e),
        }
    })
}

/// # Safety
/// `s` must be null or a scenario from [`edsa_scenario_from_toml`], freed once.
#[no_mangle]
pub unsafe extern "C" fn edsa_scenario_free(s: *mut EdsaScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live scenario handle.
#[no_mangle]
pub unsafe extern "C" fn edsa_scenario_demand_count(s: *const EdsaScenario) -> usize {
    s.as_ref().map_or(0, |s| s.0.demands.len())
}

/// # Safety
/// `s` must be a live scenario handle.
#[no_mangle]
pub unsafe extern "C" fn edsa_scenario_device_count(s: *const EdsaScenario) -> usize {
    s.as_ref().map_or(0, |s| s.0.devices.len())
}

unsafe fn store_report(r: Result<SolveReport, edsa_core::solver::SolveError>, out: *mut *mut EdsaReport) -> EdsaStatus {
    match r {
        Ok(rep) => {
            *out = Box::into_raw(Box::new(EdsaReport(rep)));
            EdsaStatus::Ok
        }
        Err(e) => fail(EdsaStatus::SolveFailed, e),
    }
}

/// # Safety
/// `s` must be a live scenario handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn edsa_solve_greedy(s: *const EdsaScenario, out: *mut *mut EdsaReport) -> EdsaStatus {
    guard(|| {
        non_null!(s, out);
        store_report(solve_greedy(&(*s).0), out)
    })
}

/// Exact search with the default size limits and a time budget in
/// milliseconds.
///
/// # Safety
/// `s` must be a live scenario handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn edsa_solve_exact(
    s: *const EdsaScenario,
    timeout_ms: u64,
    out: *mut *mut EdsaReport,
) -> EdsaStatus {
    guard(|| {
        non_null!(s, out);
        let limits = ExactLimits {
            timeout: Duration::from_millis(timeout_ms),
            ..ExactLimits::default()
        };
        store_report(solve_exact(&(*s).0, &limits), out)
    })
}

/// # Safety
/// `r` must be null or a report handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn edsa_report_free(r: *mut EdsaReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Plan revenue; NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn edsa_report_revenue(r: *const EdsaReport) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.plan.revenue)
}

/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn edsa_report_selected_count(r: *const EdsaReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.selected_count)
}

/// Whether the plan is proved optimal.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn edsa_report_is_optimal(r: *const EdsaReport) -> bool {
    r.as_ref().is_some_and(|r| r.0.optimal)
}

/// Full report as JSON.
///
/// # Safety
/// `r` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn edsa_report_to_json(r: *const EdsaReport, out: *mut *mut c_char) -> EdsaStatus {
    guard(|| {
        non_null!(r, out);
        match serde_json::to_string(&(*r).0) {
            Ok(s) => put_string(out, s),
            Err(e) => fail(EdsaStatus::InvalidInput, e),
        }
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn edsa_prices_new(out: *mut *mut EdsaPrices) -> EdsaStatus {
    guard(|| {
        non_null!(out);
        *out = Box::into_raw(Box::new(EdsaPrices(PriceLedger::new())));
        EdsaStatus::Ok
    })
}

/// # Safety
/// `p` must be null or a price ledger handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn edsa_prices_free(p: *mut EdsaPrices) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Appends a traded price.
///
/// # Safety
/// `p` must be a live price ledger handle.
#[no_mangle]
pub unsafe extern "C" fn edsa_prices_record(
    p: *mut EdsaPrices,
    data_type: u16,
    price: f64,
    quality_score: f64,
    risk_score: f64,
    timestamp: i64,
) -> EdsaStatus {
    guard(|| {
        non_null!(p);
        let rec = PriceRecord {
            timestamp,
            data_type: DataType(data_type),
            price,
            quality_score,
            risk_score,
        };
        match (*p).0.record_price(rec) {
            Ok(_) => EdsaStatus::Ok,
            Err(e) => fail(EdsaStatus::InvalidInput, e),
        }
    })
}

/// Quotes a final price from the records in `[start, end)`. Returns
/// `NoData` when the window holds no records of the type.
///
/// # Safety
/// `p` must be a live price ledger handle and `out` a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn edsa_prices_quote(
    p: *const EdsaPrices,
    data_type: u16,
    start: i64,
    end: i64,
    quality_score: f64,
    risk_score: f64,
    beta: f64,
    exe_fee: f64,
    out: *mut f64,
) -> EdsaStatus {
    guard(|| {
        non_null!(p, out);
        let window = match Window::new(start, end) {
            Ok(w) => w,
            Err(e) => return fail(EdsaStatus::InvalidInput, e),
        };
        match (*p)
            .0
            .quote(DataType(data_type), window, quality_score, risk_score, beta, exe_fee)
        {
            Ok(q) => {
                *out = q.final_price;
                EdsaStatus::Ok
            }
            Err(e @ PricingError::NoRecords { .. }) => fail(EdsaStatus::NoData, e),
            Err(e) => fail(EdsaStatus::InvalidInput, e),
        }
    })
}

/// Creates an empty ledger. `keys_json` maps actor ids to signing secrets,
/// e.g. `{"seller":"s1","buyer":"b1"}`; `config_json` may be null for the
/// default configuration.
///
/// # Safety
/// String arguments must be valid C strings (or null where allowed) and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn edsa_ledger_new(
    keys_json: *const c_char,
    config_json: *const c_char,
    out: *mut *mut EdsaLedger,
) -> EdsaStatus {
    guard(|| {
        non_null!(out);
        let keys: std::collections::BTreeMap<String, String> = match serde_json::from_str(try_status!(text(keys_json))) {
            Ok(k) => k,
            Err(e) => return fail(EdsaStatus::InvalidInput, e),
        };
        let config: LedgerConfig = if config_json.is_null() {
            LedgerConfig::default()
        } else {
            match serde_json::from_str(try_status!(text(config_json))) {
                Ok(c) => c,
                Err(e) => return fail(EdsaStatus::InvalidInput, e),
            }
        };
        let mut ring = KeyRing::new();
        for (actor, secret) in keys {
            ring.insert(ActorId::new(actor), secret.into_bytes());
        }
        *out = Box::into_raw(Box::new(EdsaLedger(Ledger::new(ring, config))));
        EdsaStatus::Ok
    })
}

/// # Safety
/// `l` must be null or a ledger handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn edsa_ledger_free(l: *mut EdsaLedger) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Signs `payload_json` with each of the `n_signers` actors and submits it.
/// On success the receipt JSON is written to `receipt_out` (for reads, the
/// query result). A rejected transaction returns `Rejected` and leaves the
/// ledger unchanged.
///
/// # Safety
/// `l` must be a live ledger handle, `signers` must point to `n_signers`
/// valid C strings, and `receipt_out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn edsa_ledger_submit(
    l: *mut EdsaLedger,
    payload_json: *const c_char,
    signers: *const *const c_char,
    n_signers: usize,
    receipt_out: *mut *mut c_char,
) -> EdsaStatus {
    guard(|| {
        non_null!(l, receipt_out);
        if n_signers > 0 && signers.is_null() {
            return fail(EdsaStatus::NullArgument, "null argument: signers");
        }
        let payload: TxPayload = match serde_json::from_str(try_status!(text(payload_json))) {
            Ok(p) => p,
            Err(e) => return fail(EdsaStatus::InvalidInput, e),
        };
        let ledger = &mut (*l).0;
        let mut tx = LedgerTx::new(payload);
        for i in 0..n_signers {
            let who = try_status!(text(*signers.add(i)));
            tx = tx.signed_by(ledger.keys(), &ActorId::new(who));
        }
        let encoded = if tx.payload.is_read() {
            ledger.query(&tx).map(|q| serde_json::to_string(&q))
        } else {
            ledger.submit(tx).map(|r| serde_json::to_string(&r))
        };
        match encoded {
            Ok(Ok(s)) => put_string(receipt_out, s),
            Ok(Err(e)) => fail(EdsaStatus::InvalidInput, e),
            Err(e) => fail(EdsaStatus::Rejected, e),
        }
    })
}

/// Number of committed log entries.
///
/// # Safety
/// `l` must be null or a live ledger handle.
#[no_mangle]
pub unsafe extern "C" fn edsa_ledger_len(l: *const EdsaLedger) -> usize {
    l.as_ref().map_or(0, |l| l.0.log().len())
}

/// Hex digest of the materialized state.
///
/// # Safety
/// `l` must be a live ledger handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn edsa_ledger_state_digest(l: *const EdsaLedger, out: *mut *mut c_char) -> EdsaStatus {
    guard(|| {
        non_null!(l, out);
        put_string(out, (*l).0.digest())
    })
}

/// Hash-chained log as newline-delimited JSON.
///
/// # Safety
/// `l` must be a live ledger handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn edsa_ledger_log_ndjson(l: *const EdsaLedger, out: *mut *mut c_char) -> EdsaStatus {
    guard(|| {
        non_null!(l, out);
        let mut buf = Vec::new();
        if let Err(e) = (*l).0.chain().write_ndjson(&mut buf) {
            return fail(EdsaStatus::InvalidInput, e);
        }
        put_string(out, String::from_utf8_lossy(&buf).into_owned())
    })
}
