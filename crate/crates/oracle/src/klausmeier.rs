//! Parameter scans of the extended Klausmeier vegetation model
//!
//! ```text
//! u_t = dΔu + βu_x + a − u − uv²,    v_t = Δv − mv + uv²,
//! ```
//!
//! expanded about the vegetated steady state with the larger `v`. At each
//! point of a `(κ, a)` grid a stripe is computed by Newton continuation
//! (sweeping `a` downward at fixed `κ`), and its Bloch spectra are sampled on
//! rectangular lattices `K₂ = (0, ℓ)` and rhombic lattices `K₂ = (−κ/2, ℓ)`
//! over a logarithmic grid of transverse wavenumbers `ℓ`.
//!
//! The rhombic spectrum, as a function of `ℓ`, has local maxima ("peaks");
//! each peak crossing zero traces a criticality curve in the `(κ, a)` plane.
//! [`rhombic_crossing`] locates points where two such curves intersect.

use num_complex::Complex64;
use rayon::prelude::*;
use stripelab_core::boundaries::{Axis, RegionLabel};
use stripelab_core::presets::Klausmeier;
use stripelab_core::System64;

use crate::error::{OracleError, Result};
use crate::spectrum::{bloch_spectrum_with, sideband_curvatures};
use crate::stripe::{solve_stripe_with, Coupling, SolveOptions, StripeGuess, StripeSolution};

/// Growth rates above this count as instability.
pub const UNSTABLE_TOL: f64 = 1e-8;

/// Model parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlausmeierParams {
    pub m: f64,
    pub d: f64,
    pub beta: f64,
}

impl KlausmeierParams {
    /// `m = 0.45`, `d = 500` with advection `beta`.
    pub fn standard(beta: f64) -> Self {
        let k = Klausmeier::<f64>::standard(0.0);
        KlausmeierParams { m: k.m, d: k.d, beta }
    }

    pub fn model(&self, a: f64) -> Klausmeier<f64> {
        Klausmeier { a, m: self.m, d: self.d }
    }

    /// System expanded about the vegetated state at rainfall `a`.
    pub fn system(&self, a: f64) -> Result<System64> {
        Ok(self.model(a).system()?)
    }

    /// Largest real part of the homogeneous state's dispersion at wavevector `(κ, 0)`.
    pub fn linear_growth(&self, a: f64, kappa: f64) -> Result<f64> {
        let sys = self.system(a)?;
        let s = sys.symbol(kappa, 0.0, 0.0, self.beta, 0.0);
        let half_tr = (s[0][0] + s[1][1]) * 0.5;
        let disc = (half_tr * half_tr - (s[0][0] * s[1][1] - s[0][1] * s[1][0])).sqrt();
        Ok((half_tr + disc).re.max((half_tr - disc).re))
    }

    /// Rainfall at which stripes of wavenumber `κ` bifurcate: the largest
    /// `a ∈ [lo, hi]` at which the homogeneous state is unstable to `(κ, 0)`,
    /// by bisection from a bracket with growth at `lo` and decay at `hi`.
    pub fn onset(&self, kappa: f64, lo: f64, hi: f64) -> Option<f64> {
        let g = |a: f64| self.linear_growth(a, kappa).ok();
        if !(g(lo)? > 0.0 && g(hi)? <= 0.0) {
            return None;
        }
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > 1e-12 * hi {
            let mid = 0.5 * (lo + hi);
            if g(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }
}

/// Logarithmic sampling of the transverse wavenumber, in units of `kc`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllSweep {
    pub per_decade: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Default for EllSweep {
    fn default() -> Self {
        EllSweep { per_decade: 64, lo: 0.01, hi: 1.5 }
    }
}

impl EllSweep {
    /// Sample points for critical wavenumber `kc`, increasing.
    pub fn grid(&self, kc: f64) -> Vec<f64> {
        let decades = (self.hi / self.lo).log10();
        let count = (self.per_decade as f64 * decades).ceil() as usize;
        (0..=count).map(|i| kc * self.lo * (self.hi / self.lo).powf(i as f64 / count as f64)).collect()
    }
}

/// Discretization of a scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSettings {
    /// Stripe truncation.
    pub n: usize,
    /// Bloch truncation.
    pub n_lat: usize,
    pub sweep: EllSweep,
}

impl Default for ScanSettings {
    fn default() -> Self {
        ScanSettings { n: 64, n_lat: 6, sweep: EllSweep::default() }
    }
}

/// A local maximum of the rhombic growth rate over `ℓ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub ell: f64,
    pub value: f64,
}

/// Outcome of the stripe computation at a grid point.
#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Stripe,
    /// Newton found no nontrivial stripe where the homogeneous state is stable to `(κ, 0)`.
    NoStripe,
    /// Newton or an eigensolve failed where a stripe was expected.
    Failed(String),
}

/// Stability of a stripe at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct CellAnalysis {
    pub residual: f64,
    pub n_used: usize,
    pub c_num: f64,
    pub eckhaus_curvature: f64,
    pub zigzag_curvature: f64,
    /// Real part of the amplitude eigenvalue at `γ = ℓ = 0`; positive on
    /// branches that are already unstable in one dimension.
    pub amplitude_eigenvalue: f64,
    /// Largest real part along the translation branch of the rectangular sweep.
    pub zigzag_branch_max: f64,
    /// Largest growth rate over the rectangular sweep.
    pub rect_max: f64,
    /// Largest growth rate over the rhombic sweep.
    pub rhomb_max: f64,
    /// Growth rates on the quasi-square (`ℓ = kc`), hexagonal and quasi-hexagonal lattices.
    pub quasi_square: f64,
    pub hex: f64,
    pub quasihex: f64,
    /// Refined local maxima of the rhombic growth rate, increasing in `ℓ`.
    pub rhomb_peaks: Vec<Peak>,
}

impl CellAnalysis {
    /// Instability to longitudinal sidebands: positive `γ²`-curvature of the
    /// translation branch, or an unstable amplitude eigenvalue (which makes
    /// every small `γ` unstable).
    pub fn eckhaus(&self) -> bool {
        self.eckhaus_curvature > 0.0 || self.amplitude_eigenvalue > UNSTABLE_TOL
    }

    /// Transverse long-wave instability: positive `ℓ²`-curvature of the
    /// translation branch, or growth anywhere along that branch in the sweep.
    pub fn zigzag(&self) -> bool {
        self.zigzag_curvature > 0.0 || self.zigzag_branch_max > UNSTABLE_TOL
    }

    /// Instability on some rectangular lattice, including the zigzag limit `ℓ → 0`.
    pub fn rect_breakup(&self) -> bool {
        self.rect_max > UNSTABLE_TOL || self.zigzag()
    }

    /// Instability on some rhombic lattice.
    pub fn rhomb_breakup(&self) -> bool {
        self.rhomb_max > UNSTABLE_TOL
    }

    pub fn max_re(&self) -> f64 {
        self.rect_max.max(self.rhomb_max)
    }
}

/// One grid point of a scan.
#[derive(Clone, Debug, PartialEq)]
pub struct CellRecord {
    /// Column (`κ`) and row (`a`) indices.
    pub i: usize,
    pub j: usize,
    pub kappa: f64,
    pub a: f64,
    pub status: CellStatus,
    pub analysis: Option<CellAnalysis>,
}

impl CellRecord {
    pub fn exists(&self) -> bool {
        self.analysis.is_some()
    }

    fn flag(&self, f: impl Fn(&CellAnalysis) -> bool) -> bool {
        self.analysis.as_ref().is_some_and(f)
    }

    pub fn rhomb_breakup(&self) -> bool {
        self.flag(CellAnalysis::rhomb_breakup)
    }

    pub fn rect_breakup(&self) -> bool {
        self.flag(CellAnalysis::rect_breakup)
    }

    pub fn eckhaus(&self) -> bool {
        self.flag(CellAnalysis::eckhaus)
    }

    /// Line-delimited diagnostic record: cell index, residual, truncation, largest growth rate.
    pub fn log_line(&self, columns: usize) -> String {
        let status = match &self.status {
            CellStatus::Stripe => "stripe".to_string(),
            CellStatus::NoStripe => "none".to_string(),
            CellStatus::Failed(msg) => format!("failed: {msg}"),
        };
        let (res, n, mx) = match &self.analysis {
            Some(c) => (c.residual, c.n_used, c.max_re()),
            None => (f64::NAN, 0, f64::NAN),
        };
        format!(
            "cell={} i={} j={} kappa={:.6} a={:.6} residual={:.3e} N={} max_re={:.6e} status={}",
            self.j * columns + self.i,
            self.i,
            self.j,
            self.kappa,
            self.a,
            res,
            n,
            mx,
            status
        )
    }
}

/// Result of [`klausmeier_scan`]: cells in row-major order, index `j·len(kappa) + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct KlausmeierScan {
    pub params: KlausmeierParams,
    pub settings: ScanSettings,
    pub kappa: Vec<f64>,
    pub a: Vec<f64>,
    pub cells: Vec<CellRecord>,
}

impl KlausmeierScan {
    pub fn cell(&self, i: usize, j: usize) -> &CellRecord {
        &self.cells[j * self.kappa.len() + i]
    }

    /// Region labels in the diagram-grid layout: `square` carries rectangle
    /// breakup, `hex` rhomb breakup and `quasihex` the quasi-hexagonal lattice.
    pub fn labels(&self) -> Vec<RegionLabel> {
        self.cells
            .iter()
            .map(|c| match &c.analysis {
                None => RegionLabel::default(),
                Some(x) => {
                    let mut l = RegionLabel {
                        exists: true,
                        zigzag_unstable: x.zigzag(),
                        eckhaus_unstable: x.eckhaus(),
                        square_unstable: x.rect_breakup(),
                        hex_unstable: x.rhomb_breakup(),
                        quasihex_unstable: x.quasihex > UNSTABLE_TOL,
                        ..RegionLabel::default()
                    };
                    l.stable_all_checked = !(l.zigzag_unstable
                        || l.eckhaus_unstable
                        || l.square_unstable
                        || l.hex_unstable
                        || l.quasihex_unstable);
                    l
                }
            })
            .collect()
    }

    pub fn log_lines(&self) -> Vec<String> {
        self.cells.iter().map(|c| c.log_line(self.kappa.len())).collect()
    }

    /// Mask over the grid, row-major.
    pub fn mask(&self, f: impl Fn(&CellRecord) -> bool) -> Vec<bool> {
        self.cells.iter().map(f).collect()
    }

    /// Number of 4-connected components of a row-major mask on this grid.
    pub fn components(&self, mask: &[bool]) -> usize {
        count_components(mask, self.kappa.len(), self.a.len())
    }

    /// Existing cells whose neighbour at the next larger `a` has no stripe:
    /// the one-cell layer along the upper existence boundary, where the
    /// stripe amplitude is not resolved by the grid.
    pub fn onset_layer(&self) -> Vec<bool> {
        let nx = self.kappa.len();
        (0..self.cells.len())
            .map(|k| {
                let (i, j) = (k % nx, k / nx);
                let above = (0..self.a.len())
                    .filter(|&jj| self.a[jj] > self.a[j])
                    .min_by(|&x, &y| self.a[x].total_cmp(&self.a[y]));
                self.cells[k].exists() && above.is_none_or(|jj| !self.cell(i, jj).exists())
            })
            .collect()
    }

    /// Index of the topmost existing cell (largest `a`) in each column.
    pub fn onset_cells(&self) -> Vec<Option<usize>> {
        (0..self.kappa.len())
            .map(|i| {
                (0..self.a.len())
                    .filter(|&j| self.cell(i, j).exists())
                    .max_by(|&x, &y| self.a[x].total_cmp(&self.a[y]))
                    .map(|j| j * self.kappa.len() + i)
            })
            .collect()
    }

    /// The existing cell and pair of rhombic peaks minimizing `max(|p₁|, |p₂|)`:
    /// the grid estimate of where two rhombic criticality curves cross.
    pub fn crossing_estimate(&self) -> Option<(usize, [Peak; 2])> {
        let mut best: Option<(f64, usize, [Peak; 2])> = None;
        for (idx, c) in self.cells.iter().enumerate() {
            let Some(x) = &c.analysis else { continue };
            for (p, q) in x.rhomb_peaks.iter().zip(x.rhomb_peaks.iter().skip(1)) {
                let score = p.value.abs().max(q.value.abs());
                if best.as_ref().is_none_or(|b| score < b.0) {
                    best = Some((score, idx, [*p, *q]));
                }
            }
        }
        best.map(|(_, idx, p)| (idx, p))
    }
}

/// Number of 4-connected components of `mask` on an `nx × ny` row-major grid.
pub fn count_components(mask: &[bool], nx: usize, ny: usize) -> usize {
    component_labels(mask, nx, ny).into_iter().flatten().max().map_or(0, |m| m + 1)
}

/// 4-connected component index of every set cell of `mask` (`None` outside
/// the mask), numbered in order of first appearance in row-major order.
pub fn component_labels(mask: &[bool], nx: usize, ny: usize) -> Vec<Option<usize>> {
    assert_eq!(mask.len(), nx * ny, "mask size does not match the grid");
    let mut label: Vec<Option<usize>> = vec![None; mask.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || label[start].is_some() {
            continue;
        }
        label[start] = Some(count);
        stack.push(start);
        while let Some(k) = stack.pop() {
            let (i, j) = (k % nx, k / nx);
            let neighbours = [
                (i > 0).then(|| k - 1),
                (i + 1 < nx).then(|| k + 1),
                (j > 0).then(|| k - nx),
                (j + 1 < ny).then(|| k + nx),
            ];
            for n in neighbours.into_iter().flatten() {
                if mask[n] && label[n].is_none() {
                    label[n] = Some(count);
                    stack.push(n);
                }
            }
        }
        count += 1;
    }
    label
}

/// Largest growth rate on the Bloch space with wavevector shift `(γ, ℓ)`.
///
/// The sweeps only use shifts with `ℓ > 0`, whose Bloch spaces do not contain
/// the translation mode, so no eigenvalue is excluded: a critical eigenvalue
/// passing through zero must stay visible.
fn growth(sys: &System64, stripe: &StripeSolution, coupling: &Coupling, gamma: f64, ell: f64, n_lat: usize) -> Result<f64> {
    let ev: Vec<Complex64> = bloch_spectrum_with(sys, stripe, coupling, gamma, ell, n_lat)?;
    Ok(ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Maximize `f` over `[lo, hi]` by golden-section search in `ln ℓ`.
fn golden_max(lo: f64, hi: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<Peak> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1.exp())?, f(x2.exp())?);
    while b - a > 1e-7 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2.exp())?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1.exp())?;
        }
    }
    Ok(if f1 >= f2 { Peak { ell: x1.exp(), value: f1 } } else { Peak { ell: x2.exp(), value: f2 } })
}

/// Critical wavenumber of the homogeneous state; falls back to `κ` when undefined.
fn critical_wavenumber(sys: &System64, kappa: f64) -> f64 {
    match sys.critical_wavenumber_sq() {
        Ok(k2) if k2 > 0.0 => k2.sqrt(),
        _ => kappa,
    }
}

/// Sideband curvatures and lattice sweeps of a converged stripe.
pub fn analyze_stripe(sys: &System64, stripe: &StripeSolution, settings: &ScanSettings) -> Result<CellAnalysis> {
    let n_lat = settings.n_lat;
    let kappa = stripe.kappa;
    let coupling = stripe.coupling(sys);
    let curv = sideband_curvatures(sys, stripe, n_lat)?;
    let kc = critical_wavenumber(sys, kappa);
    let grid = settings.sweep.grid(kc);
    let rect = |ell: f64| growth(sys, stripe, &coupling, 0.0, ell, n_lat);
    let rhomb = |ell: f64| growth(sys, stripe, &coupling, -kappa / 2.0, ell, n_lat);
    let mut rect_max = f64::NEG_INFINITY;
    let mut branch_max = f64::NEG_INFINITY;
    // The translation branch, continued from λ = 0 at ℓ = 0 by nearest match
    // until another eigenvalue comes comparably close.
    let mut branch = Some(Complex64::new(0.0, 0.0));
    let mut profile = Vec::with_capacity(grid.len());
    for &ell in &grid {
        let ev = bloch_spectrum_with(sys, stripe, &coupling, 0.0, ell, n_lat)?;
        rect_max = ev.iter().map(|z| z.re).fold(rect_max, f64::max);
        if let Some(b) = branch {
            let mut by_distance: Vec<Complex64> = ev.clone();
            by_distance.sort_by(|x, y| (x - b).norm().total_cmp(&(y - b).norm()));
            branch = match by_distance.as_slice() {
                [first, second, ..] if (first - b).norm() < 0.5 * (second - b).norm() => Some(*first),
                _ => None,
            };
            if let Some(z) = branch {
                branch_max = branch_max.max(z.re);
            }
        }
        profile.push(rhomb(ell)?);
    }
    let quasi_square = rect(kc)?;
    let hex = rhomb(3f64.sqrt() * kappa / 2.0)?;
    let qh2 = kc * kc - kappa * kappa / 4.0;
    let quasihex = if qh2 > 0.0 { rhomb(qh2.sqrt())? } else { f64::NEG_INFINITY };
    let mut rhomb_peaks = Vec::new();
    for k in 1..grid.len().saturating_sub(1) {
        if profile[k] >= profile[k - 1] && profile[k] > profile[k + 1] {
            rhomb_peaks.push(golden_max(grid[k - 1], grid[k + 1], rhomb)?);
        }
    }
    let rhomb_max = profile
        .iter()
        .copied()
        .chain(rhomb_peaks.iter().map(|p| p.value))
        .chain([hex, quasihex])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CellAnalysis {
        residual: stripe.residual_norm,
        n_used: stripe.n,
        c_num: stripe.c_num,
        eckhaus_curvature: curv.eckhaus,
        zigzag_curvature: curv.zigzag,
        amplitude_eigenvalue: curv.amplitude_eigenvalue,
        zigzag_branch_max: branch_max,
        rect_max: rect_max.max(quasi_square),
        rhomb_max,
        quasi_square,
        hex,
        quasihex,
        rhomb_peaks,
    })
}

/// Stripe at `(κ, a)`, from `warm` if given, otherwise (or if that fails) from the local guess.
pub fn klausmeier_stripe(
    params: &KlausmeierParams,
    kappa: f64,
    a: f64,
    warm: Option<&StripeSolution>,
    n: usize,
) -> Result<(System64, StripeSolution)> {
    let sys = params.system(a)?;
    let opts = SolveOptions::with_n(n);
    let from = |g| solve_stripe_with(&sys, 0.0, params.beta, kappa, g, &opts);
    let s = match warm {
        Some(w) => from(StripeGuess::Warm(w)).or_else(|_| from(StripeGuess::Local)),
        None => from(StripeGuess::Local),
    }?;
    Ok((sys, s))
}

/// Substeps tried when a direct warm start fails.
const CONTINUATION_SUBSTEPS: usize = 4;

/// Stripe at `(κ, a)` continued from the stripe `prev` computed at rainfall
/// `prev_a`: a direct warm start, then [`CONTINUATION_SUBSTEPS`] intermediate
/// steps, then the local guess.
fn continue_stripe(
    params: &KlausmeierParams,
    kappa: f64,
    a: f64,
    prev: Option<&(f64, StripeSolution)>,
    n: usize,
) -> Result<(System64, StripeSolution)> {
    let Some((prev_a, prev_s)) = prev else {
        return klausmeier_stripe(params, kappa, a, None, n);
    };
    let sys = params.system(a)?;
    let opts = SolveOptions::with_n(n);
    if let Ok(s) = solve_stripe_with(&sys, 0.0, params.beta, kappa, StripeGuess::Warm(prev_s), &opts) {
        return Ok((sys, s));
    }
    let mut cur = prev_s.clone();
    let mut stepped = true;
    for k in 1..=CONTINUATION_SUBSTEPS {
        let ak = prev_a + (a - prev_a) * k as f64 / CONTINUATION_SUBSTEPS as f64;
        match klausmeier_stripe(params, kappa, ak, Some(&cur), n) {
            Ok((_, s)) => cur = s,
            Err(_) => {
                stepped = false;
                break;
            }
        }
    }
    if stepped {
        return Ok((sys, cur));
    }
    klausmeier_stripe(params, kappa, a, None, n)
}

/// One `κ` column, sweeping `a` downward with warm starts.
fn scan_column(params: &KlausmeierParams, settings: &ScanSettings, i: usize, kappa: f64, a: &[f64]) -> Vec<CellRecord> {
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&x, &y| a[y].total_cmp(&a[x]));
    let mut prev: Option<(f64, StripeSolution)> = None;
    let mut out: Vec<Option<CellRecord>> = vec![None; a.len()];
    for j in order {
        let (status, analysis) = match continue_stripe(params, kappa, a[j], prev.as_ref(), settings.n) {
            Ok((sys, s)) => {
                let res = analyze_stripe(&sys, &s, settings);
                prev = Some((a[j], s));
                match res {
                    Ok(x) => (CellStatus::Stripe, Some(x)),
                    Err(e) => (CellStatus::Failed(e.to_string()), None),
                }
            }
            Err(e) => {
                prev = None;
                match params.linear_growth(a[j], kappa) {
                    Ok(g) if g <= 0.0 => (CellStatus::NoStripe, None),
                    _ => (CellStatus::Failed(e.to_string()), None),
                }
            }
        };
        out[j] = Some(CellRecord { i, j, kappa, a: a[j], status, analysis });
    }
    out.into_iter().flatten().collect()
}

/// Classify stripes over the `(κ, a)` grid. Per-cell failures are recorded in
/// the grid; only invalid input aborts.
pub fn klausmeier_scan(
    params: KlausmeierParams,
    kappa_axis: Axis<f64>,
    a_axis: Axis<f64>,
    settings: ScanSettings,
) -> Result<KlausmeierScan> {
    let kappa = kappa_axis.values();
    let a = a_axis.values();
    if kappa.is_empty() || a.is_empty() {
        return Err(OracleError::InvalidInput("empty scan axis".into()));
    }
    if let Some(bad) = a.iter().find(|&&x| !(x >= 2.0 * params.m)) {
        return Err(OracleError::InvalidInput(format!(
            "rainfall a = {bad} is below 2m = {}: no vegetated state",
            2.0 * params.m
        )));
    }
    if let Some(bad) = kappa.iter().find(|&&k| !(k > 0.0 && k.is_finite())) {
        return Err(OracleError::InvalidInput(format!("wavenumber κ = {bad} must be positive")));
    }
    let columns: Vec<Vec<CellRecord>> = kappa
        .par_iter()
        .enumerate()
        .map(|(i, &k)| scan_column(&params, &settings, i, k, &a))
        .collect();
    let mut cells: Vec<Option<CellRecord>> = vec![None; kappa.len() * a.len()];
    for col in columns {
        for c in col {
            let idx = c.j * kappa.len() + c.i;
            cells[idx] = Some(c);
        }
    }
    let cells = cells.into_iter().map(|c| c.expect("every cell is computed")).collect();
    Ok(KlausmeierScan { params, settings, kappa, a, cells })
}

/// Intersection of two rhombic criticality curves.
#[derive(Clone, Debug, PartialEq)]
pub struct RhombicCrossing {
    pub kappa: f64,
    pub a: f64,
    /// The two critical peaks at the crossing (values ≈ 0).
    pub peaks: [Peak; 2],
    pub iterations: usize,
}

/// Refined rhombic peak near `hint`: local maximum over `ℓ ∈ hint·[1/w, w]`.
fn peak_near(sys: &System64, stripe: &StripeSolution, coupling: &Coupling, hint: f64, n_lat: usize) -> Result<Peak> {
    let w: f64 = 1.1;
    let f = |ell: f64| growth(sys, stripe, coupling, -stripe.kappa / 2.0, ell, n_lat);
    let samples = 16;
    let grid: Vec<f64> = (0..=samples).map(|i| hint * w.powf(2.0 * i as f64 / samples as f64 - 1.0)).collect();
    let vals = grid.iter().map(|&l| f(l)).collect::<Result<Vec<_>>>()?;
    let k = (0..vals.len()).max_by(|&x, &y| vals[x].total_cmp(&vals[y])).unwrap_or(0);
    let (lo, hi) = (grid[k.saturating_sub(1)], grid[(k + 1).min(samples)]);
    golden_max(lo, hi, f)
}

/// Locate the point where two rhombic peaks vanish simultaneously, by Newton
/// iteration in `(κ, a)` with finite-difference Jacobian, starting from a grid
/// estimate and the `ℓ` positions of the two peaks there.
pub fn rhombic_crossing(
    params: &KlausmeierParams,
    settings: &ScanSettings,
    kappa0: f64,
    a0: f64,
    ell_hints: [f64; 2],
) -> Result<RhombicCrossing> {
    let n_lat = settings.n_lat;
    let mut base: Option<StripeSolution> = None;
    let eval = |kappa: f64, a: f64, hints: [f64; 2], warm: Option<&StripeSolution>| -> Result<(StripeSolution, [Peak; 2])> {
        let (sys, s) = klausmeier_stripe(params, kappa, a, warm, settings.n)?;
        let coupling = s.coupling(&sys);
        let p0 = peak_near(&sys, &s, &coupling, hints[0], n_lat)?;
        let p1 = peak_near(&sys, &s, &coupling, hints[1], n_lat)?;
        Ok((s, [p0, p1]))
    };
    let (mut kappa, mut a, mut hints) = (kappa0, a0, ell_hints);
    let (s, mut peaks) = eval(kappa, a, hints, None)?;
    base.replace(s);
    let (hk, ha) = (1e-4, 2.5e-4);
    for it in 1..=30 {
        hints = [peaks[0].ell, peaks[1].ell];
        let b = base.clone();
        let (_, pk) = eval(kappa + hk, a, hints, b.as_ref())?;
        let (_, pa) = eval(kappa, a + ha, hints, b.as_ref())?;
        let j = [
            [(pk[0].value - peaks[0].value) / hk, (pa[0].value - peaks[0].value) / ha],
            [(pk[1].value - peaks[1].value) / hk, (pa[1].value - peaks[1].value) / ha],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(OracleError::SingularJacobian(it));
        }
        let (f0, f1) = (peaks[0].value, peaks[1].value);
        let mut dk = -(j[1][1] * f0 - j[0][1] * f1) / det;
        let mut da = -(-j[1][0] * f0 + j[0][0] * f1) / det;
        // Keep steps within a few grid spacings.
        let scale = (dk.abs() / 0.01).max(da.abs() / 0.025).max(1.0);
        dk /= scale;
        da /= scale;
        kappa += dk;
        a += da;
        let (s, p) = eval(kappa, a, hints, b.as_ref())?;
        base.replace(s);
        peaks = p;
        let small_step = dk.abs() < 1e-7 && da.abs() < 1e-7;
        if small_step || peaks[0].value.abs().max(peaks[1].value.abs()) < 1e-11 {
            return Ok(RhombicCrossing { kappa, a, peaks, iterations: it });
        }
    }
    Err(OracleError::NewtonDiverged { iterations: 30, residual: peaks[0].value.abs().max(peaks[1].value.abs()) })
}
