//! Shared fixtures and numerical checks for the integration and acceptance
//! tests.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scfw::linalg::{dist2, dot, norm2, sub};
use scfw::problems::{read_libsvm, synth, LogisticProblem, PoissonProblem, PortfolioProblem};
use scfw::sets::Simplex;
use scfw::{
    certificate_lower_bound, lloo, estimate_sigma, fw_solve, lloo_fw_solve, local_norm, omega,
    omega_star, FeasibleSet, LlooConfig, RunConfig, ScOracle, StepPolicy,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/fixture200.svm")
}

pub fn portfolio() -> PortfolioProblem {
    PortfolioProblem::new(synth::portfolio_matrix(50, 20, 7)).unwrap()
}

pub fn poisson() -> PoissonProblem {
    let data = read_libsvm(fixture_path()).unwrap();
    PoissonProblem::with_unit_counts(data.to_matrix(1).unwrap(), 10.0).unwrap()
}

pub fn logistic() -> LogisticProblem {
    let (phi, y) = synth::gen_logistic_data(200, 50, 7);
    LogisticProblem::with_defaults(phi, y, 10.0).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Portfolio,
    Poisson,
    Logistic,
}

pub const FAMILIES: [Family; 3] = [Family::Portfolio, Family::Poisson, Family::Logistic];

pub fn build(family: Family) -> Box<dyn ScOracle + Send> {
    match family {
        Family::Portfolio => Box::new(portfolio()),
        Family::Poisson => Box::new(poisson()),
        Family::Logistic => Box::new(logistic()),
    }
}

pub fn build_set(family: Family, dim: usize) -> Box<dyn FeasibleSet + Send> {
    match family {
        Family::Portfolio => Box::new(Simplex::new(dim)),
        Family::Poisson => Box::new(scfw::NonnegL1Ball::new(dim, 10.0).unwrap()),
        Family::Logistic => Box::new(scfw::L1Ball::new(dim, 10.0).unwrap()),
    }
}

/// Positive weights summing to one, bounded away from the faces.
pub fn simplex_point(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -rng.gen_range(1e-3f64..1.0).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| 0.5 * v / s + 0.5 / n as f64).collect()
}

/// Random feasible point strictly inside the set of `family`.
pub fn interior_point(family: Family, rng: &mut impl Rng, n: usize) -> Vec<f64> {
    match family {
        Family::Portfolio => simplex_point(rng, n),
        Family::Poisson => {
            let scale = rng.gen_range(0.05..0.9) * 10.0;
            simplex_point(rng, n).iter().map(|v| v * scale).collect()
        }
        Family::Logistic => {
            let scale = rng.gen_range(0.0..0.9) * 10.0;
            simplex_point(rng, n)
                .iter()
                .map(|v| if rng.gen_bool(0.5) { v * scale } else { -v * scale })
                .collect()
        }
    }
}

pub fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = norm2(&u);
        if s > 1e-3 {
            return u.iter().map(|v| v / s).collect();
        }
    }
}

/// Central differences of `value`, relative error in the 2-norm.
pub fn gradient_fd_error<O: ScOracle + ?Sized>(o: &O, x: &[f64]) -> f64 {
    let h = 1e-6;
    let g = o.gradient(x).unwrap();
    let fd: Vec<f64> = (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            (o.value(&p) - o.value(&m)) / (2.0 * h)
        })
        .collect();
    norm2(&sub(&g, &fd)) / norm2(&g)
}

/// `‖Hu - (g(x + δu) - g(x))/δ‖ / (1e-4 ‖Hu‖ + 1e-6)`; at most 1 passes.
pub fn hess_fd_ratio<O: ScOracle + ?Sized>(o: &O, x: &[f64], u: &[f64]) -> f64 {
    let delta = 1e-6;
    let hu = o.hess_vec(x, u).unwrap();
    let xp: Vec<f64> = x.iter().zip(u).map(|(a, b)| a + delta * b).collect();
    let g0 = o.gradient(x).unwrap();
    let g1 = o.gradient(&xp).unwrap();
    let fd: Vec<f64> = g1.iter().zip(&g0).map(|(a, b)| (a - b) / delta).collect();
    norm2(&sub(&hu, &fd)) / (1e-4 * norm2(&hu) + 1e-6)
}

pub fn hess_asymmetry<O: ScOracle + ?Sized>(o: &O, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let a = dot(v, &o.hess_vec(x, u).unwrap());
    let b = dot(u, &o.hess_vec(x, v).unwrap());
    (a - b).abs() / (1.0 + a.abs())
}

pub fn local_norm_inconsistency<O: ScOracle + ?Sized>(o: &O, x: &[f64], u: &[f64]) -> f64 {
    let ln = local_norm(o, x, u).unwrap();
    (ln * ln - dot(u, &o.hess_vec(x, u).unwrap())).abs() / (1.0 + dot(u, u))
}

/// Violations of the self-concordant lower and upper bounds around `x` for
/// a partner point at `d(x, x~) = target`; positive entries are failures.
pub fn sc_bound_violation<O: ScOracle + ?Sized>(o: &O, x: &[f64], u: &[f64], target: f64) -> (f64, f64) {
    let m = o.sc_param();
    let nu = local_norm(o, x, u).unwrap();
    let step = 2.0 * target / (m * nu);
    let y: Vec<f64> = x.iter().zip(u).map(|(a, b)| a + step * b).collect();
    assert!(o.in_domain(&y), "Dikin ellipsoid point left the domain");
    let d = scfw::dist_like(o, x, &y).unwrap();
    let fx = o.value(x);
    let lin = fx + dot(&o.gradient(x).unwrap(), &sub(&y, x));
    let k = 4.0 / (m * m);
    let fy = o.value(&y);
    let lower = lin + k * omega(d).unwrap() - 1e-9 - fy;
    let upper = fy - (lin + k * omega_star(d).unwrap() + 1e-9);
    (lower, upper)
}

/// Worst normalized values of every oracle-calculus check over `pairs`
/// random interior points; each entry passes when at most 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct CalculusReport {
    pub gradient: f64,
    pub hessian: f64,
    pub symmetry: f64,
    pub local_norm: f64,
    pub sc_lower: f64,
    pub sc_upper: f64,
}

impl CalculusReport {
    pub fn passes(&self) -> bool {
        self.gradient <= 1.0
            && self.hessian <= 1.0
            && self.symmetry <= 1.0
            && self.local_norm <= 1.0
            && self.sc_lower <= 0.0
            && self.sc_upper <= 0.0
    }
}

pub fn calculus_report(family: Family, pairs: usize, seed: u64) -> CalculusReport {
    let o = build(family);
    let n = o.dim();
    let mut r = rng(seed);
    let mut rep = CalculusReport {
        sc_lower: f64::NEG_INFINITY,
        sc_upper: f64::NEG_INFINITY,
        ..Default::default()
    };
    for _ in 0..pairs {
        let x = interior_point(family, &mut r, n);
        let u = unit_vector(&mut r, n);
        let v = unit_vector(&mut r, n);
        rep.gradient = rep.gradient.max(gradient_fd_error(o.as_ref(), &x) / 1e-5);
        rep.hessian = rep.hessian.max(hess_fd_ratio(o.as_ref(), &x, &u));
        rep.symmetry = rep.symmetry.max(hess_asymmetry(o.as_ref(), &x, &u, &v) / 1e-10);
        rep.local_norm = rep.local_norm.max(local_norm_inconsistency(o.as_ref(), &x, &u) / 1e-10);
        let target = r.gen_range(0.01..0.9);
        let (lo, up) = sc_bound_violation(o.as_ref(), &x, &u, target);
        rep.sc_lower = rep.sc_lower.max(lo);
        rep.sc_upper = rep.sc_upper.max(up);
    }
    rep
}

/// High-accuracy optimal value estimate for a simplex problem: best value
/// and best certified lower bound over a line-search run and an LLOO run to
/// gap 1e-12.
pub struct Reference {
    pub value: f64,
    pub lower: f64,
    pub line_search_gap: f64,
}

pub fn simplex_reference<O: ScOracle + ?Sized>(o: &O) -> Reference {
    let set = Simplex::new(o.dim());
    let line = fw_solve(o, &set, &RunConfig::new(StepPolicy::LineSearch).epsilon(1e-12).record_times(false)).unwrap();
    let sigma = estimate_sigma(o, &set.start_point()).unwrap();
    let lcfg = LlooConfig::for_simplex(o.dim(), sigma);
    let lloo = lloo_fw_solve(o, &set, &RunConfig::default().epsilon(1e-12).record_times(false), &lcfg).unwrap();
    Reference {
        value: line.best_value().min(lloo.best_value()),
        lower: certificate_lower_bound(&line).max(certificate_lower_bound(&lloo)),
        line_search_gap: line.last().gap,
    }
}

/// `f∘A` for a positive diagonal `A`.
pub struct Scaled<'a, O: ScOracle + ?Sized> {
    pub inner: &'a O,
    pub diag: Vec<f64>,
}

impl<O: ScOracle + ?Sized> Scaled<'_, O> {
    fn map(&self, z: &[f64]) -> Vec<f64> {
        z.iter().zip(&self.diag).map(|(a, b)| a * b).collect()
    }
}

impl<O: ScOracle + ?Sized> ScOracle for Scaled<'_, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn sc_param(&self) -> f64 {
        self.inner.sc_param()
    }
    fn value(&self, z: &[f64]) -> f64 {
        self.inner.value(&self.map(z))
    }
    fn gradient(&self, z: &[f64]) -> scfw::Result<Vec<f64>> {
        Ok(self.map(&self.inner.gradient(&self.map(z))?))
    }
    fn hess_vec(&self, z: &[f64], u: &[f64]) -> scfw::Result<Vec<f64>> {
        Ok(self.map(&self.inner.hess_vec(&self.map(z), &self.map(u))?))
    }
    fn in_domain(&self, z: &[f64]) -> bool {
        self.inner.in_domain(&self.map(z))
    }
}

/// `A^{-1} Δ` for a positive diagonal `A`: vertices `e_i / a_i`.
pub struct ScaledSimplex {
    pub diag: Vec<f64>,
}

impl FeasibleSet for ScaledSimplex {
    fn dim(&self) -> usize {
        self.diag.len()
    }
    fn lmo(&self, c: &[f64]) -> scfw::Result<Vec<f64>> {
        let scaled: Vec<f64> = c.iter().zip(&self.diag).map(|(a, b)| a / b).collect();
        let mut s = scfw::sets::lmo_simplex(&scaled)?;
        for (si, a) in s.iter_mut().zip(&self.diag) {
            *si /= a;
        }
        Ok(s)
    }
    fn contains(&self, z: &[f64]) -> bool {
        let x: Vec<f64> = z.iter().zip(&self.diag).map(|(a, b)| a * b).collect();
        Simplex::new(x.len()).contains(&x)
    }
    fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.diag.len() {
            for j in i + 1..self.diag.len() {
                best = best.max((self.diag[i].powi(-2) + self.diag[j].powi(-2)).sqrt());
            }
        }
        best
    }
    fn start_point(&self) -> Vec<f64> {
        let n = self.diag.len() as f64;
        self.diag.iter().map(|a| 1.0 / (n * a)).collect()
    }
}

/// Rejection sample of `y` in the simplex with `‖y - x‖_2 <= r`.
pub fn ball_sample(rng: &mut impl Rng, x: &[f64], r: f64) -> Option<Vec<f64>> {
    for _ in 0..200 {
        let y = if rng.gen_bool(0.5) {
            simplex_point(rng, x.len())
        } else {
            // local perturbation keeps the acceptance rate up for small r
            let d: Vec<f64> = (0..x.len()).map(|_| rng.gen_range(-r..r)).collect();
            let mean = d.iter().sum::<f64>() / x.len() as f64;
            x.iter().zip(&d).map(|(a, b)| a + b - mean).collect()
        };
        if y.iter().all(|v| *v >= 0.0) && dist2(&y, x) <= r {
            return Some(y);
        }
    }
    None
}

/// Worst slack of `<c, p> <= <c, y> + 1e-10` and `‖x - p‖ <= √n r + 1e-12`
/// over random instances (both pass when not positive), and the number of
/// ball samples compared against.
pub fn lloo_brute_force(seed: u64, instances: usize, samples: usize) -> (f64, f64, usize) {
    let mut rng = rng(seed);
    let (mut opt, mut rad) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut drawn = 0;
    for n in 2..=4 {
        for _ in 0..instances {
            let x = simplex_point(&mut rng, n);
            let r = rng.gen_range(0.01..1.0);
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = lloo(&x, r, &c).unwrap().point;
            rad = rad.max(dist2(&x, &p) - ((n as f64).sqrt() * r + 1e-12));
            let cp = dot(&c, &p);
            for _ in 0..samples {
                if let Some(y) = ball_sample(&mut rng, &x, r) {
                    drawn += 1;
                    opt = opt.max(cp - dot(&c, &y) - 1e-10);
                }
            }
        }
    }
    (opt, rad, drawn)
}

