//! Linearization of a stripe on Fourier lattices and Bloch spectra.
//!
//! Perturbations are expanded in modes `e^{i m·x}` with `m = n₁K₁ + n₂K₂`,
//! `K₁ = (κ, 0)`. The stripe only couples modes that differ by multiples of
//! `K₁`, so the lattice operator is block diagonal in `n₂`; each block is a
//! Bloch operator with wavevector shift `n₂K₂`.

use faer::Mat;
use num_complex::Complex64;
use stripelab_core::System64;

use crate::dense::eigenvalues;
use crate::error::{OracleError, Result};
use crate::stripe::{CMat, Coupling, StripeSolution};

/// Eigenvalues within this distance of zero count as the translation mode.
pub const TRANSLATION_TOL: f64 = 1e-7;

/// Lattice geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeKind {
    Square,
    Rectangle,
    Hexagonal,
    Rhombic,
    QuasiHexagonal,
}

impl LatticeKind {
    /// Number `2j` of kernel modes at onset.
    pub fn critical_count(self) -> usize {
        match self {
            LatticeKind::Square | LatticeKind::Rectangle => 4,
            _ => 6,
        }
    }
}

/// Generators of a Fourier lattice and its truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub k1: [f64; 2],
    pub k2: [f64; 2],
    /// Modes `|n₁|, |n₂| ≤ n_lat`.
    pub n_lat: usize,
}

impl LatticeSpec {
    /// `K₂ = (0, ℓ)`.
    pub fn rectangle(kappa: f64, ell: f64, n_lat: usize) -> Self {
        LatticeSpec { kind: LatticeKind::Rectangle, k1: [kappa, 0.0], k2: [0.0, ell], n_lat }
    }

    /// Rectangle with `ℓ = κ`.
    pub fn square(kappa: f64, n_lat: usize) -> Self {
        LatticeSpec { kind: LatticeKind::Square, ..Self::rectangle(kappa, kappa, n_lat) }
    }

    /// `K₂ = (−κ/2, ℓ)`.
    pub fn rhombic(kappa: f64, ell: f64, n_lat: usize) -> Self {
        LatticeSpec { kind: LatticeKind::Rhombic, k1: [kappa, 0.0], k2: [-kappa / 2.0, ell], n_lat }
    }

    /// Rhombic with `ℓ = √3κ/2`.
    pub fn hexagonal(kappa: f64, n_lat: usize) -> Self {
        LatticeSpec { kind: LatticeKind::Hexagonal, ..Self::rhombic(kappa, 3f64.sqrt() * kappa / 2.0, n_lat) }
    }

    /// Rhombic with `ℓ = √(kc² − κ²/4)`, so that `|K₂| = kc`.
    pub fn quasihexagonal(kappa: f64, kc: f64, n_lat: usize) -> Result<Self> {
        let l2 = kc * kc - kappa * kappa / 4.0;
        if l2 <= 0.0 {
            return Err(OracleError::InvalidInput(format!("no quasi-hexagonal lattice for κ = {kappa}, kc = {kc}")));
        }
        Ok(LatticeSpec { kind: LatticeKind::QuasiHexagonal, ..Self::rhombic(kappa, l2.sqrt(), n_lat) })
    }

    /// Rhombic with `ℓ = √3(kc + ℓ̃)/2`: the periodic box `[0, 4π/κ] × [0, 4π/(√3(kc + ℓ̃))]`.
    pub fn detuned_quasihexagonal(kappa: f64, kc: f64, ell_tilde: f64, n_lat: usize) -> Self {
        LatticeSpec {
            kind: LatticeKind::QuasiHexagonal,
            ..Self::rhombic(kappa, 3f64.sqrt() * (kc + ell_tilde) / 2.0, n_lat)
        }
    }

    /// Wavevector of mode `(n₁, n₂)`.
    pub fn mode(&self, n1: isize, n2: isize) -> [f64; 2] {
        let (a, b) = (n1 as f64, n2 as f64);
        [a * self.k1[0] + b * self.k2[0], a * self.k1[1] + b * self.k2[1]]
    }
}

/// Spectrum of a stripe on a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    /// The `2j` eigenvalues nearest to zero, by modulus.
    pub critical_set: Vec<Complex64>,
    /// Largest real part among eigenvalues farther than [`TRANSLATION_TOL`] from zero.
    pub max_real_excluding_translation: f64,
    /// Modulus of the translation eigenvalue (smallest modulus in the `n₂ = 0` block).
    pub translation_eigenvalue_abs: f64,
}

/// Bloch operator of the stripe for modes `(jκ + s_x, s_y)`, `|j| ≤ n_lat`:
/// symbol `−|m|²D + L + α̌M + i m_x βB(c)` on the diagonal, coupling `M_{j−j′}` off it.
pub fn bloch_matrix(
    sys: &System64,
    stripe: &StripeSolution,
    coupling: &Coupling,
    shift: [f64; 2],
    n_lat: usize,
) -> Mat<Complex64> {
    let size = 2 * (2 * n_lat + 1);
    let mut m = Mat::<Complex64>::zeros(size, size);
    fill_bloch(&mut m, 0, sys, stripe, coupling, shift, n_lat);
    m
}

fn fill_bloch(
    m: &mut Mat<Complex64>,
    offset: usize,
    sys: &System64,
    stripe: &StripeSolution,
    coupling: &Coupling,
    shift: [f64; 2],
    n_lat: usize,
) {
    let nl = n_lat as isize;
    for j in -nl..=nl {
        let r = offset + 2 * (j + nl) as usize;
        let kx = j as f64 * stripe.kappa + shift[0];
        let s = sys.symbol(kx, shift[1], stripe.alpha_check, stripe.beta, stripe.c_num);
        for jp in -nl..=nl {
            let col = offset + 2 * (jp + nl) as usize;
            let cm: CMat = coupling.get(j - jp);
            for a in 0..2 {
                for b in 0..2 {
                    let mut v = cm[a][b];
                    if j == jp {
                        v += s[a][b];
                    }
                    m[(r + a, col + b)] = v;
                }
            }
        }
    }
}

fn check_stripe_lattice(stripe: &StripeSolution, lattice: &LatticeSpec) -> Result<()> {
    if (lattice.k1[0] - stripe.kappa).abs() > 1e-12 * stripe.kappa.max(1.0) || lattice.k1[1] != 0.0 {
        return Err(OracleError::InvalidInput(format!(
            "lattice generator K₁ = {:?} is not the stripe wavevector (κ, 0) with κ = {}",
            lattice.k1, stripe.kappa
        )));
    }
    if lattice.n_lat > stripe.n {
        return Err(OracleError::InvalidInput(format!(
            "lattice truncation {} exceeds the stripe truncation {}",
            lattice.n_lat, stripe.n
        )));
    }
    Ok(())
}

/// Full lattice operator (dense, size `2(2N_lat+1)²`).
pub fn lattice_matrix(sys: &System64, stripe: &StripeSolution, lattice: &LatticeSpec) -> Result<Mat<Complex64>> {
    check_stripe_lattice(stripe, lattice)?;
    let coupling = stripe.coupling(sys);
    let nl = lattice.n_lat as isize;
    let block = 2 * (2 * lattice.n_lat + 1);
    let size = block * (2 * lattice.n_lat + 1);
    let mut m = Mat::<Complex64>::zeros(size, size);
    for n2 in -nl..=nl {
        let off = block * (n2 + nl) as usize;
        fill_bloch(&mut m, off, sys, stripe, &coupling, lattice.mode(0, n2), lattice.n_lat);
    }
    Ok(m)
}

/// Spectrum of the stripe on a lattice by a single dense eigensolve of the full operator.
pub fn lattice_linearization(sys: &System64, stripe: &StripeSolution, lattice: &LatticeSpec) -> Result<SpectrumResult> {
    let m = lattice_matrix(sys, stripe, lattice)?;
    let ev = eigenvalues(&m)?;
    let coupling = stripe.coupling(sys);
    let b0 = eigenvalues(&bloch_matrix(sys, stripe, &coupling, [0.0, 0.0], lattice.n_lat))?;
    Ok(summarize(ev, &b0, lattice.kind.critical_count()))
}

/// Same spectrum assembled block by block (`n₂ = −N_lat..N_lat`).
pub fn lattice_linearization_blocks(
    sys: &System64,
    stripe: &StripeSolution,
    lattice: &LatticeSpec,
) -> Result<SpectrumResult> {
    check_stripe_lattice(stripe, lattice)?;
    let coupling = stripe.coupling(sys);
    let nl = lattice.n_lat as isize;
    let mut all = Vec::new();
    let mut b0 = Vec::new();
    for n2 in -nl..=nl {
        let ev = eigenvalues(&bloch_matrix(sys, stripe, &coupling, lattice.mode(0, n2), lattice.n_lat))?;
        if n2 == 0 {
            b0 = ev.clone();
        }
        all.extend(ev);
    }
    Ok(summarize(all, &b0, lattice.kind.critical_count()))
}

fn summarize(mut ev: Vec<Complex64>, block0: &[Complex64], count: usize) -> SpectrumResult {
    ev.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im)));
    let critical_set = ev.iter().take(count).copied().collect();
    let translation = block0.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    SpectrumResult {
        max_real_excluding_translation: max_real_excluding_translation(&ev),
        critical_set,
        translation_eigenvalue_abs: translation,
        eigenvalues: ev,
    }
}

/// Largest real part among eigenvalues farther than [`TRANSLATION_TOL`] from zero.
pub fn max_real_excluding_translation(ev: &[Complex64]) -> f64 {
    ev.iter().filter(|z| z.norm() > TRANSLATION_TOL).map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Eigenvalues of the Bloch operator with `x`-Floquet exponent `γ` and
/// transverse wavenumber `ℓ`, on `|j| ≤ n_lat` harmonics.
pub fn bloch_spectrum(
    sys: &System64,
    stripe: &StripeSolution,
    gamma: f64,
    ell: f64,
    n_lat: usize,
) -> Result<Vec<Complex64>> {
    let coupling = stripe.coupling(sys);
    bloch_spectrum_with(sys, stripe, &coupling, gamma, ell, n_lat)
}

/// [`bloch_spectrum`] with precomputed coupling.
pub fn bloch_spectrum_with(
    sys: &System64,
    stripe: &StripeSolution,
    coupling: &Coupling,
    gamma: f64,
    ell: f64,
    n_lat: usize,
) -> Result<Vec<Complex64>> {
    if n_lat > stripe.n {
        return Err(OracleError::InvalidInput(format!("Bloch truncation {n_lat} exceeds stripe truncation {}", stripe.n)));
    }
    eigenvalues(&bloch_matrix(sys, stripe, coupling, [gamma, ell], n_lat))
}

/// Second-order coefficients of the critical (translation) branch:
/// `Re λ(γ, 0) ≈ eckhaus·γ²` and `Re λ(0, ℓ) ≈ zigzag·ℓ²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SidebandCurvatures {
    pub eckhaus: f64,
    pub zigzag: f64,
    /// Step used for the fits.
    pub step: f64,
    /// The amplitude eigenvalue (second-nearest to zero at `γ = ℓ = 0`).
    pub amplitude_eigenvalue: f64,
}

/// Fit the curvatures of the translation branch by Richardson extrapolation,
/// `c ≈ (16 Re λ(h) − Re λ(2h)) / (12h²)`, with `h` well inside the radius where
/// the branch stays separated from the amplitude eigenvalue.
pub fn sideband_curvatures(sys: &System64, stripe: &StripeSolution, n_lat: usize) -> Result<SidebandCurvatures> {
    let coupling = stripe.coupling(sys);
    let mut ev0 = bloch_spectrum_with(sys, stripe, &coupling, 0.0, 0.0, n_lat)?;
    ev0.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let amp = ev0.get(1).map(|z| z.re).unwrap_or(-1.0);
    let dmax = sys.d[0].max(sys.d[1]);
    let h = (0.1 * (amp.abs() / dmax).sqrt()).min(1e-2 * stripe.kappa);
    let branch = |g: f64, l: f64| -> Result<f64> {
        let ev = bloch_spectrum_with(sys, stripe, &coupling, g, l, n_lat)?;
        Ok(ev.iter().min_by(|a, b| a.norm().total_cmp(&b.norm())).map(|z| z.re).unwrap_or(f64::NAN))
    };
    let fit = |r1: f64, r2: f64| (16.0 * r1 - r2) / (12.0 * h * h);
    let eckhaus = fit(branch(h, 0.0)?, branch(2.0 * h, 0.0)?);
    let zigzag = fit(branch(0.0, h)?, branch(0.0, 2.0 * h)?);
    Ok(SidebandCurvatures { eckhaus, zigzag, step: h, amplitude_eigenvalue: amp })
}
