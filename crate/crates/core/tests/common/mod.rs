//! Flat dense-matrix reference model.
//!
//! Everything here works on the full truncated two-mode space with
//! `n_a + n_b <= N`, built from ladder matrices and `DMatrix::exp`, without
//! the sector machinery of the library.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use kerr_mzi::C64;
use nalgebra::DMatrix;

pub type M = DMatrix<C64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    SelfKerr,
    CrossKerr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossAt {
    AfterFirstBs,
    AfterSecondBs,
}

/// Basis `(n_a, n_b)` with total at most `n_max`.
pub struct Space {
    pub n_max: usize,
    pub basis: Vec<(usize, usize)>,
}

impl Space {
    pub fn new(n_max: usize) -> Self {
        let mut basis = Vec::new();
        for na in 0..=n_max {
            for nb in 0..=n_max - na {
                basis.push((na, nb));
            }
        }
        Self { n_max, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index(&self, na: usize, nb: usize) -> Option<usize> {
        self.basis.iter().position(|&x| x == (na, nb))
    }

    fn count(&self, i: usize, mode: Mode) -> usize {
        match mode {
            Mode::A => self.basis[i].0,
            Mode::B => self.basis[i].1,
        }
    }

    pub fn lower(&self, mode: Mode) -> M {
        let d = self.dim();
        let mut m = M::zeros(d, d);
        for (i, &(na, nb)) in self.basis.iter().enumerate() {
            let target = match mode {
                Mode::A if na > 0 => self.index(na - 1, nb),
                Mode::B if nb > 0 => self.index(na, nb - 1),
                _ => None,
            };
            if let Some(j) = target {
                m[(j, i)] = C64::new((self.count(i, mode) as f64).sqrt(), 0.0);
            }
        }
        m
    }

    pub fn number(&self, mode: Mode) -> M {
        let d = self.dim();
        M::from_fn(d, d, |r, c| if r == c { C64::new(self.count(r, mode) as f64, 0.0) } else { C64::new(0.0, 0.0) })
    }

    fn diag_phase<F: Fn(usize, usize) -> f64>(&self, f: F) -> M {
        let d = self.dim();
        let mut m = M::zeros(d, d);
        for (i, &(na, nb)) in self.basis.iter().enumerate() {
            m[(i, i)] = C64::cis(f(na, nb));
        }
        m
    }

    /// `exp(i pi/4 (a^dag b + a b^dag))`.
    pub fn beamsplitter(&self) -> M {
        let a = self.lower(Mode::A);
        let b = self.lower(Mode::B);
        // Lower before raising so the truncation never clips the sector.
        let g = a.adjoint() * &b + b.adjoint() * &a;
        (g * C64::new(0.0, FRAC_PI_4)).exp()
    }

    pub fn phase(&self, phi: f64) -> M {
        self.diag_phase(|na, _| phi * na as f64)
    }

    pub fn kerr(&self, kind: Kind, chi: f64) -> M {
        match kind {
            Kind::SelfKerr => self.diag_phase(|na, _| chi * (na * na.saturating_sub(1)) as f64),
            Kind::CrossKerr => self.diag_phase(|na, nb| chi * (na * nb) as f64),
        }
    }

    /// Pure loss of the fraction `1 - t` on `mode`:
    /// `K_j = sqrt((1-t)^j / j!) t^(n/2) a^j`.
    pub fn loss(&self, rho: &M, t: f64, mode: Mode) -> M {
        let a = self.lower(mode);
        let d = self.dim();
        let damp = self.diag_real(|i| t.powf(self.count(i, mode) as f64 / 2.0));
        let mut out = M::zeros(d, d);
        let mut aj = M::identity(d, d);
        let mut fact = 1.0;
        for j in 0..=self.n_max {
            if j > 0 {
                aj = &a * aj;
                fact *= j as f64;
            }
            let k = &damp * &aj * C64::new(((1.0 - t).powi(j as i32) / fact).sqrt(), 0.0);
            out += &k * rho * k.adjoint();
        }
        out
    }

    fn diag_real<F: Fn(usize) -> f64>(&self, f: F) -> M {
        let d = self.dim();
        M::from_fn(d, d, |r, c| if r == c { C64::new(f(r), 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// `sum_n w_n |n, 0><n, 0|`.
    pub fn diagonal_input(&self, weights: &[f64]) -> M {
        let d = self.dim();
        let mut m = M::zeros(d, d);
        for (n, &w) in weights.iter().enumerate().take(self.n_max + 1) {
            let i = self.index(n, 0).unwrap();
            m[(i, i)] = C64::new(w, 0.0);
        }
        m
    }

    pub fn pure_input(&self, amps: &[C64]) -> M {
        let d = self.dim();
        let mut v = nalgebra::DVector::<C64>::zeros(d);
        for (n, &z) in amps.iter().enumerate().take(self.n_max + 1) {
            v[self.index(n, 0).unwrap()] = z;
        }
        &v * v.adjoint()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Setup {
    pub kind: Kind,
    pub chi: f64,
    pub loss: f64,
    pub loss_mode: Mode,
    pub loss_at: LossAt,
}

pub fn conj(u: &M, rho: &M) -> M {
    u * rho * u.adjoint()
}

/// Circuit up to the second beamsplitter plus any loss: the state entering
/// the phase shifter.
pub fn before_phase(space: &Space, rho: &M, s: &Setup) -> M {
    let bs = space.beamsplitter();
    let mut r = conj(&bs, rho);
    if s.loss > 0.0 && s.loss_at == LossAt::AfterFirstBs {
        r = space.loss(&r, 1.0 - s.loss, s.loss_mode);
    }
    r = conj(&space.phase(FRAC_PI_2), &r);
    r = conj(&space.kerr(s.kind, s.chi), &r);
    r = conj(&bs, &r);
    if s.loss > 0.0 && s.loss_at == LossAt::AfterSecondBs {
        r = space.loss(&r, 1.0 - s.loss, s.loss_mode);
    }
    r
}

pub fn after_second_bs(space: &Space, rho: &M, s: &Setup) -> M {
    let mut t = *s;
    if t.loss_at == LossAt::AfterSecondBs {
        t.loss = 0.0;
    }
    before_phase(space, rho, &t)
}

/// Ideal output populations keyed by `(n_a, n_b)` and their phase
/// derivatives, from `d rho / d phi = i [n_a, rho]` before the last
/// beamsplitter.
pub fn output(space: &Space, before: &M, phi: f64) -> (Vec<f64>, Vec<f64>) {
    let bs = space.beamsplitter();
    let shifted = conj(&space.phase(phi), before);
    let na = space.number(Mode::A);
    let comm = (&na * &shifted - &shifted * &na) * C64::new(0.0, 1.0);
    let out = conj(&bs, &shifted);
    let dout = conj(&bs, &comm);
    let p = (0..space.dim()).map(|i| out[(i, i)].re).collect();
    let dp = (0..space.dim()).map(|i| dout[(i, i)].re).collect();
    (p, dp)
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Independent binomial detector smearing on a population vector.
pub fn smear(space: &Space, p: &[f64], eta: f64) -> Vec<f64> {
    let mut out = vec![0.0; space.dim()];
    for (i, &(na, nb)) in space.basis.iter().enumerate() {
        for ma in 0..=na {
            for mb in 0..=nb {
                let w = binom(na, ma) * eta.powi(ma as i32) * (1.0 - eta).powi((na - ma) as i32)
                    * binom(nb, mb) * eta.powi(mb as i32) * (1.0 - eta).powi((nb - mb) as i32);
                out[space.index(ma, mb).unwrap()] += w * p[i];
            }
        }
    }
    out
}

pub fn fisher(p: &[f64], dp: &[f64]) -> f64 {
    p.iter().zip(dp).filter(|(p, _)| **p > 1e-14).map(|(p, d)| d * d / p).sum()
}

/// Group outcomes by a key and return the merged distribution.
pub fn coarse<F: Fn(usize, usize) -> i64>(space: &Space, p: &[f64], key: F) -> Vec<f64> {
    let mut map = std::collections::BTreeMap::<i64, f64>::new();
    for (i, &(na, nb)) in space.basis.iter().enumerate() {
        *map.entry(key(na, nb)).or_default() += p[i];
    }
    map.into_values().collect()
}

pub struct FisherSet {
    pub joint: f64,
    pub single_b: f64,
    pub difference: f64,
    pub parity_b: f64,
    pub parity: f64,
}

pub fn fisher_set(space: &Space, p: &[f64], dp: &[f64]) -> FisherSet {
    let single = |v: &[f64]| coarse(space, v, |_, nb| nb as i64);
    let diff = |v: &[f64]| coarse(space, v, |na, nb| na as i64 - nb as i64);
    let par = |v: &[f64]| coarse(space, v, |_, nb| (nb % 2) as i64);
    let pp = par(p);
    FisherSet {
        joint: fisher(p, dp),
        single_b: fisher(&single(p), &single(dp)),
        difference: fisher(&diff(p), &diff(dp)),
        parity_b: fisher(&pp, &par(dp)),
        parity: pp[0] - pp.get(1).copied().unwrap_or(0.0),
    }
}

/// `2 sum (l_i - l_j)^2 / (l_i + l_j) |<i|n_a|j>|^2` from a full
/// eigendecomposition.
pub fn qfi(space: &Space, rho: &M) -> f64 {
    let h = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let k = v.adjoint() * space.number(Mode::A) * v;
    let l = &eig.eigenvalues;
    let mut f = 0.0;
    for i in 0..l.len() {
        for j in 0..l.len() {
            let s = l[i] + l[j];
            if s > 1e-12 {
                f += 2.0 * (l[i] - l[j]).powi(2) / s * k[(i, j)].norm_sqr();
            }
        }
    }
    f
}

pub fn expect(rho: &M, op: &M) -> C64 {
    (rho * op).trace()
}

pub struct Witness {
    pub hz: f64,
    pub sv: f64,
    pub g2_a: f64,
    pub g2_b: f64,
    pub ad_b: C64,
}

pub fn witnesses(space: &Space, rho: &M) -> Witness {
    let a = space.lower(Mode::A);
    let b = space.lower(Mode::B);
    let ad = a.adjoint();
    let bd = b.adjoint();
    let e = |op: &M| expect(rho, op);
    let na = e(&(&ad * &a)).re;
    let nb = e(&(&bd * &b)).re;
    let ad_b = e(&(&ad * &b));
    let hz = e(&(&ad * &a * &bd * &b)).re - ad_b.norm_sqr();
    let x = [
        [C64::new(1.0, 0.0), e(&a), e(&bd)],
        [e(&ad), C64::new(na, 0.0), e(&(&ad * &bd))],
        [e(&b), e(&(&a * &b)), C64::new(nb, 0.0)],
    ];
    let sv = M::from_fn(3, 3, |r, c| x[r][c]).determinant().re;
    let g2 = |l: &M, n: f64| e(&(l.adjoint() * l.adjoint() * l * l)).re / (n * n);
    Witness { hz, sv, g2_a: g2(&a, na), g2_b: g2(&b, nb), ad_b }
}

use kerr_mzi::detection::DetectorModel;
use kerr_mzi::fockspace::{SectorState, State};
use kerr_mzi::inputs::{build_input, InputSpec};
use kerr_mzi::interferometer::{state_after_second_bs, CircuitSpec, KerrKind, LossPlacement};
use kerr_mzi::metrology::{fisher_report, qfi_of_state, PhaseFamily, PhaseGrid};
use kerr_mzi::witnesses::{compute_moments, g2_zero, hillery_zubairy, shchukin_vogel};
use kerr_mzi::ModeSelector;
use rand::Rng;

#[derive(Clone, Debug)]
pub enum Input {
    Diagonal(Vec<f64>),
    Pure(Vec<C64>),
}

#[derive(Clone, Debug)]
pub struct Config {
    pub input: Input,
    pub setup: Setup,
    pub phi: f64,
    pub eta_det: f64,
}

impl Config {
    pub fn n_max(&self) -> usize {
        match &self.input {
            Input::Diagonal(w) => w.len() - 1,
            Input::Pure(a) => a.len() - 1,
        }
    }

    pub fn circuit(&self) -> CircuitSpec {
        let s = &self.setup;
        let kind = match s.kind {
            Kind::SelfKerr => KerrKind::SelfKerr,
            Kind::CrossKerr => KerrKind::CrossKerr,
        };
        let mode = match s.loss_mode {
            Mode::A => ModeSelector::ModeA,
            Mode::B => ModeSelector::ModeB,
        };
        let at = match s.loss_at {
            LossAt::AfterFirstBs => LossPlacement::AfterFirstBs,
            LossAt::AfterSecondBs => LossPlacement::AfterSecondBs,
        };
        CircuitSpec::new(kind, s.chi, self.phi).with_loss(s.loss).with_loss_mode(mode).with_loss_placement(at)
    }

    pub fn engine_input(&self) -> State {
        match &self.input {
            Input::Diagonal(w) => build_input(&InputSpec::mixture(w.clone()), self.n_max()).unwrap(),
            Input::Pure(a) => {
                let terms: Vec<_> = a.iter().enumerate().map(|(n, &z)| ((n, 0), z)).collect();
                SectorState::from_amplitudes(self.n_max(), &terms).unwrap().into()
            }
        }
    }

    pub fn oracle_input(&self, space: &Space) -> M {
        match &self.input {
            Input::Diagonal(w) => space.diagonal_input(w),
            Input::Pure(a) => space.pure_input(a),
        }
    }
}

pub fn random_config<R: Rng>(rng: &mut R, max_n: usize) -> Config {
    let n_max = rng.random_range(1..=max_n);
    let input = if rng.random_bool(0.75) {
        let mut w: Vec<f64> = (0..=n_max).map(|_| rng.random::<f64>()).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        Input::Diagonal(w)
    } else {
        let mut a: Vec<C64> = (0..=n_max).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let s = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        a.iter_mut().for_each(|z| *z /= s);
        Input::Pure(a)
    };
    let setup = Setup {
        kind: if rng.random_bool(0.5) { Kind::SelfKerr } else { Kind::CrossKerr },
        chi: rng.random_range(0.0..std::f64::consts::PI),
        loss: if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..0.5) },
        loss_mode: if rng.random_bool(0.5) { Mode::A } else { Mode::B },
        loss_at: if rng.random_bool(0.5) { LossAt::AfterFirstBs } else { LossAt::AfterSecondBs },
    };
    Config {
        input,
        setup,
        phi: rng.random_range(0.0..std::f64::consts::TAU),
        eta_det: if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.5..1.0) },
    }
}

/// Largest disagreement between the engine and the dense model over every
/// observable, with a label naming it.
pub fn engine_vs_oracle(cfg: &Config) -> (f64, String) {
    let space = Space::new(cfg.n_max());
    let rho = cfg.oracle_input(&space);
    let before = before_phase(&space, &rho, &cfg.setup);
    let (p, dp) = output(&space, &before, cfg.phi);
    let p = smear(&space, &p, cfg.eta_det);
    let dp = smear(&space, &dp, cfg.eta_det);

    let spec = cfg.circuit();
    let state = cfg.engine_input();
    let detector = DetectorModel::new(cfg.eta_det).unwrap();
    let family = PhaseFamily::new(&state, &spec, detector).unwrap();
    let (dist, ddist) = family.tables(cfg.phi);

    let mut worst = (0.0_f64, String::new());
    let mut check = |label: &str, engine: f64, oracle: f64, scale: f64| {
        let dev = (engine - oracle).abs() / scale.max(1.0);
        if dev > worst.0 || dev.is_nan() {
            worst = (dev, format!("{label}: engine {engine} oracle {oracle}"));
        }
    };
    for (i, &(na, nb)) in space.basis.iter().enumerate() {
        check("p", dist.probability(na, nb), p[i], 1.0);
        check("dp", ddist.get(na, nb), dp[i], 1.0);
    }

    let fs = fisher_set(&space, &p, &dp);
    if let Input::Diagonal(w) = &cfg.input {
        let grid = PhaseGrid::new(vec![cfg.phi], 1e-6).unwrap();
        let report = fisher_report(&InputSpec::mixture(w.clone()), &spec, detector, &grid).unwrap();
        let pt = report.points[0];
        check("F_joint", pt.joint, fs.joint, fs.joint);
        check("F_single", pt.single, fs.single_b, fs.single_b);
        check("F_difference", pt.difference, fs.difference, fs.difference);
        check("F_parity", pt.parity_fisher, fs.parity_b, fs.parity_b);
        check("parity", pt.parity, fs.parity, 1.0);
    }

    let fq = qfi(&space, &before);
    check("F_Q", qfi_of_state(family.state_before_phase()), fq, fq);

    let tapped = state_after_second_bs(&state, &spec).unwrap();
    let oracle_tap = after_second_bs(&space, &rho, &cfg.setup);
    let w = witnesses(&space, &oracle_tap);
    let m = compute_moments(&tapped);
    check("E_HZ", hillery_zubairy(&m), w.hz, 1.0);
    check("E_SV", shchukin_vogel(&m), w.sv, 1.0);
    check("<a^dag b>", (m.ad_b - w.ad_b).norm(), 0.0, 1.0);
    if let (Ok(ga), Ok(gb)) = (g2_zero(&tapped, ModeSelector::ModeA), g2_zero(&tapped, ModeSelector::ModeB)) {
        check("g2_a", ga, w.g2_a, 1.0);
        check("g2_b", gb, w.g2_b, 1.0);
    }
    worst
}
