//! C ABI for `dlsfem`.
//!
//! Every fallible function returns a [`DlsfemStatus`]; on failure the message
//! is available from [`dlsfem_last_error`] on the same thread. Handles are
//! opaque and owned by the caller, who releases them with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use dlsfem::adaptivity::{afem_loop, dorfler_mark, AdaptiveHistory};
use dlsfem::benchmarks::{side_condition_diagnostic, write_csv, WeightMode};
use dlsfem::config::ExperimentConfig;
use dlsfem::mesh::{build_initial_mesh, write_dump, DomainKind, DomainSpec, Mesh};
use dlsfem::scheme::SolverPath;
use dlsfem::solver::LinearSolver;
use dlsfem::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DlsfemStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Singular or rank-deficient linear algebra.
    Numerical = 3,
    Io = 4,
    /// The estimator vanished, so nothing could be marked.
    ZeroEstimator = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DlsfemDomain {
    Square = 0,
    Rectangle = 1,
    LShape = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DlsfemWeight {
    One = 0,
    Diameter = 1,
    Width = 2,
    Friedrichs = 3,
    EllOverPi = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DlsfemSolver {
    Spd = 0,
    Saddle = 1,
    Both = 2,
}

/// Experiment parameters; fill with [`dlsfem_config_default`] first.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DlsfemConfig {
    pub domain: DlsfemDomain,
    pub ell: f64,
    pub degree: u32,
    /// `1` (natural penalty) or `-1` (over-penalized).
    pub alpha: i32,
    pub weight: DlsfemWeight,
    pub theta: f64,
    pub max_ndof: usize,
    /// `0` means no level limit.
    pub max_levels: usize,
    pub solver: DlsfemSolver,
    /// Non-zero selects Jacobi-preconditioned CG instead of the direct solver.
    pub use_cg: u8,
    /// Non-zero enables parallel assembly.
    pub parallel: u8,
    pub seed: u64,
}

/// One level of an adaptive run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DlsfemRecord {
    pub level: usize,
    pub ndof: usize,
    pub ntriangles: usize,
    pub estimator: f64,
    pub err_energy_rel: f64,
    pub err_weighted: f64,
    pub efficiency: f64,
    pub unreliable: u8,
    pub relative_residual: f64,
    pub c_omega: f64,
}

/// Opaque triangulation handle.
pub struct DlsfemMesh {
    mesh: Mesh,
}

/// Opaque handle to the records and final mesh of an adaptive run.
pub struct DlsfemHistory {
    history: AdaptiveHistory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DlsfemStatus {
    match err {
        Error::Singular(_) | Error::ConstraintRank(_) | Error::RankDeficient { .. } => DlsfemStatus::Numerical,
        Error::Io { .. } | Error::Csv(_) => DlsfemStatus::Io,
        Error::ZeroEstimator => DlsfemStatus::ZeroEstimator,
        _ => DlsfemStatus::InvalidArgument,
    }
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), (DlsfemStatus, String)>) -> DlsfemStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DlsfemStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {message}"));
            DlsfemStatus::Internal
        }
    }
}

fn lib(err: Error) -> (DlsfemStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(name: &str) -> (DlsfemStatus, String) {
    (DlsfemStatus::NullPointer, format!("{name} is null"))
}

fn invalid(message: impl Into<String>) -> (DlsfemStatus, String) {
    (DlsfemStatus::InvalidArgument, message.into())
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, (DlsfemStatus, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path).to_str().map_err(|_| invalid("path is not valid UTF-8"))?;
    Ok(PathBuf::from(s))
}

fn domain_kind(d: DlsfemDomain) -> DomainKind {
    match d {
        DlsfemDomain::Square => DomainKind::Square,
        DlsfemDomain::Rectangle => DomainKind::Rectangle,
        DlsfemDomain::LShape => DomainKind::LShape,
    }
}

fn to_config(c: &DlsfemConfig) -> ExperimentConfig {
    ExperimentConfig {
        domain: domain_kind(c.domain),
        ell: c.ell,
        k: c.degree as usize,
        alpha: c.alpha,
        weight: match c.weight {
            DlsfemWeight::One => WeightMode::One,
            DlsfemWeight::Diameter => WeightMode::Diameter,
            DlsfemWeight::Width => WeightMode::Width,
            DlsfemWeight::Friedrichs => WeightMode::Friedrichs,
            DlsfemWeight::EllOverPi => WeightMode::EllOverPi,
        },
        theta: c.theta,
        max_ndof: c.max_ndof,
        max_levels: (c.max_levels > 0).then_some(c.max_levels),
        solver: match c.solver {
            DlsfemSolver::Spd => SolverPath::Spd,
            DlsfemSolver::Saddle => SolverPath::Saddle,
            DlsfemSolver::Both => SolverPath::Both,
        },
        linear_solver: if c.use_cg != 0 {
            LinearSolver::ConjugateGradient
        } else {
            LinearSolver::Direct
        },
        parallel: c.parallel != 0,
        seed: c.seed,
        ..ExperimentConfig::default()
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dlsfem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn dlsfem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_config_default(out: *mut DlsfemConfig) -> DlsfemStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let d = ExperimentConfig::default();
        *out = DlsfemConfig {
            domain: DlsfemDomain::Square,
            ell: d.ell,
            degree: d.k as u32,
            alpha: d.alpha,
            weight: DlsfemWeight::Friedrichs,
            theta: d.theta,
            max_ndof: d.max_ndof,
            max_levels: 0,
            solver: DlsfemSolver::Spd,
            use_cg: 0,
            parallel: 0,
            seed: d.seed,
        };
        Ok(())
    })
}

/// Initial triangulation of a benchmark domain.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_mesh_new(domain: DlsfemDomain, ell: f64, out: *mut *mut DlsfemMesh) -> DlsfemStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let spec = DomainSpec::new(domain_kind(domain), ell).map_err(lib)?;
        let mesh = build_initial_mesh(&spec).map_err(lib)?;
        *out = Box::into_raw(Box::new(DlsfemMesh { mesh }));
        Ok(())
    })
}

/// # Safety
/// `mesh` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_mesh_free(mesh: *mut DlsfemMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// # Safety
/// `mesh` must be a live handle; the output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_mesh_counts(
    mesh: *const DlsfemMesh,
    vertices: *mut usize,
    triangles: *mut usize,
    edges: *mut usize,
) -> DlsfemStatus {
    guard(|| {
        let m = &mesh.as_ref().ok_or_else(|| null("mesh"))?.mesh;
        if let Some(v) = vertices.as_mut() {
            *v = m.num_vertices();
        }
        if let Some(t) = triangles.as_mut() {
            *t = m.num_triangles();
        }
        if let Some(e) = edges.as_mut() {
            *e = m.num_edges();
        }
        Ok(())
    })
}

/// Newest-vertex bisection of the `n_marked` triangles in `marked`; the input mesh is untouched.
///
/// # Safety
/// `mesh` must be a live handle, `marked` must point to `n_marked` values (or be null when
/// `n_marked` is 0) and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_mesh_refine(
    mesh: *const DlsfemMesh,
    marked: *const usize,
    n_marked: usize,
    out: *mut *mut DlsfemMesh,
) -> DlsfemStatus {
    guard(|| {
        let m = &mesh.as_ref().ok_or_else(|| null("mesh"))?.mesh;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let ids: &[usize] = if n_marked == 0 {
            &[]
        } else if marked.is_null() {
            return Err(null("marked"));
        } else {
            std::slice::from_raw_parts(marked, n_marked)
        };
        let refined = m.refine(ids).map_err(lib)?;
        *out = Box::into_raw(Box::new(DlsfemMesh { mesh: refined }));
        Ok(())
    })
}

/// # Safety
/// `mesh` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_mesh_refine_uniform(mesh: *const DlsfemMesh, out: *mut *mut DlsfemMesh) -> DlsfemStatus {
    guard(|| {
        let m = &mesh.as_ref().ok_or_else(|| null("mesh"))?.mesh;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let refined = m.refine_uniform().map_err(lib)?;
        *out = Box::into_raw(Box::new(DlsfemMesh { mesh: refined }));
        Ok(())
    })
}

/// Writes the plain-text mesh dump to `path`.
///
/// # Safety
/// `mesh` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_mesh_dump(mesh: *const DlsfemMesh, path: *const c_char) -> DlsfemStatus {
    guard(|| {
        let m = &mesh.as_ref().ok_or_else(|| null("mesh"))?.mesh;
        let path = path_arg(path)?;
        let io = |e: std::io::Error| (DlsfemStatus::Io, format!("{}: {e}", path.display()));
        let file = File::create(&path).map_err(io)?;
        write_dump(m, BufWriter::new(file)).map_err(io)
    })
}

/// Side-condition diagnostic of `mesh`.
///
/// # Safety
/// `mesh` must be a live handle; `lhs` and `rhs` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_side_condition_diagnostic(
    mesh: *const DlsfemMesh,
    lhs: *mut f64,
    rhs: *mut f64,
) -> DlsfemStatus {
    guard(|| {
        let m = &mesh.as_ref().ok_or_else(|| null("mesh"))?.mesh;
        let lhs = lhs.as_mut().ok_or_else(|| null("lhs"))?;
        let rhs = rhs.as_mut().ok_or_else(|| null("rhs"))?;
        let d = side_condition_diagnostic(m);
        *lhs = d.lhs;
        *rhs = d.rhs;
        Ok(())
    })
}

/// Dörfler marking of `n` squared indicators. `marked` needs room for `n`
/// ids; the count written is stored in `n_marked`.
///
/// # Safety
/// `eta_sq` must point to `n` values and `marked` to `n` writable slots.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_dorfler_mark(
    eta_sq: *const f64,
    n: usize,
    theta: f64,
    marked: *mut usize,
    n_marked: *mut usize,
) -> DlsfemStatus {
    guard(|| {
        if eta_sq.is_null() || marked.is_null() {
            return Err(null("eta_sq or marked"));
        }
        let count = n_marked.as_mut().ok_or_else(|| null("n_marked"))?;
        let eta = std::slice::from_raw_parts(eta_sq, n);
        let ids = dorfler_mark(eta, theta).map_err(lib)?;
        std::slice::from_raw_parts_mut(marked, n)[..ids.len()].copy_from_slice(&ids);
        *count = ids.len();
        Ok(())
    })
}

/// Runs the adaptive loop; no file is written (see [`dlsfem_history_write_csv`]).
///
/// # Safety
/// `config` must be readable and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_experiment_run(config: *const DlsfemConfig, out: *mut *mut DlsfemHistory) -> DlsfemStatus {
    guard(|| {
        let config = to_config(config.as_ref().ok_or_else(|| null("config"))?);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let history = afem_loop(&config).map_err(lib)?;
        *out = Box::into_raw(Box::new(DlsfemHistory { history }));
        Ok(())
    })
}

/// Number of completed levels; 0 for a null handle.
///
/// # Safety
/// `history` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_history_len(history: *const DlsfemHistory) -> usize {
    history.as_ref().map_or(0, |h| h.history.records.len())
}

/// # Safety
/// `history` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_history_row(
    history: *const DlsfemHistory,
    index: usize,
    out: *mut DlsfemRecord,
) -> DlsfemStatus {
    guard(|| {
        let h = &history.as_ref().ok_or_else(|| null("history"))?.history;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = h
            .records
            .get(index)
            .ok_or_else(|| invalid(format!("row {index} out of range ({} rows)", h.records.len())))?;
        *out = DlsfemRecord {
            level: r.level,
            ndof: r.ndof,
            ntriangles: r.ntriangles,
            estimator: r.estimator,
            err_energy_rel: r.err_energy_rel,
            err_weighted: r.err_weighted,
            efficiency: r.efficiency,
            unreliable: r.unreliable as u8,
            relative_residual: r.relative_residual,
            c_omega: r.c_omega,
        };
        Ok(())
    })
}

/// # Safety
/// `history` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_history_write_csv(history: *const DlsfemHistory, path: *const c_char) -> DlsfemStatus {
    guard(|| {
        let h = &history.as_ref().ok_or_else(|| null("history"))?.history;
        let path = path_arg(path)?;
        write_csv(&h.records, &path).map_err(lib)
    })
}

/// Copy of the last mesh of the run.
///
/// # Safety
/// `history` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_history_final_mesh(history: *const DlsfemHistory, out: *mut *mut DlsfemMesh) -> DlsfemStatus {
    guard(|| {
        let h = &history.as_ref().ok_or_else(|| null("history"))?.history;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = Box::into_raw(Box::new(DlsfemMesh {
            mesh: h.final_mesh.clone(),
        }));
        Ok(())
    })
}

/// # Safety
/// `history` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn dlsfem_history_free(history: *mut DlsfemHistory) {
    if !history.is_null() {
        drop(Box::from_raw(history));
    }
}
