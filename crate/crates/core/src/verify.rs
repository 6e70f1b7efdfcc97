//! Named checks with pass/fail reports. Every failing report carries a
//! concrete witness.

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::complex::{random_perturbation, ChainComplex, ManifoldSpec};
use crate::error::{Error, Result};
use crate::ring::{CoeffRing, LaurentPoly};
use crate::umodule::pid::field_e2;
use crate::umodule::{
    cokernel_module, e2_page, find_u_cyclic_class, homology, is_u_cyclic, sigma_class, Part, PresentedUModule, Variable,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckVerdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Detail {
    pub label: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub parameters: Value,
    pub verdict: CheckVerdict,
    pub details: Vec<Detail>,
    pub witness: Option<Detail>,
}

impl CheckReport {
    fn new(name: &str, parameters: Value) -> Self {
        CheckReport {
            check_name: name.into(),
            parameters,
            verdict: CheckVerdict::Pass,
            details: Vec::new(),
            witness: None,
        }
    }

    fn note(&mut self, label: impl Into<String>, value: impl Into<Value>) {
        self.details.push(Detail { label: label.into(), value: value.into() });
    }

    /// Records a failure; the first witness is kept.
    fn fail(&mut self, label: impl Into<String>, value: impl Into<Value>) {
        self.verdict = CheckVerdict::Fail;
        if self.witness.is_none() {
            self.witness = Some(Detail { label: label.into(), value: value.into() });
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == CheckVerdict::Pass
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// `d1`-homology of the torus is `(R[T]/(T^N - 1)) (x) Lambda^d(R^(b1-1))` in
/// degree `d`, with `T^N = 1`.
pub fn check_lemma_torus(b1: usize, xi: &[i64], ring: CoeffRing) -> Result<CheckReport> {
    let spec = ManifoldSpec::new(b1, xi.to_vec(), std::iter::empty(), ring)?;
    let n = spec.n_value();
    let mut r = CheckReport::new("lemma-torus", json!({ "b1": b1, "xi": xi, "ring": ring.to_string(), "N": n }));
    let cx = ChainComplex::build(&spec)?;
    let period = LaurentPoly::t_pow_minus_one(ring, n as i64);
    let expected: Vec<u64> = (0..=b1).map(|d| n * binomial(b1 - 1, d)).collect();
    r.note("expected dimensions N*C(b1-1, d)", json!(expected));
    if ring.is_field() {
        r.note("engine", "Smith form over k[T, T^-1]");
        let pages = field_e2(&cx)?;
        let dims: Vec<Option<u64>> = pages.iter().map(|m| m.dim()).collect();
        r.note("dimensions", json!(dims));
        for (d, (m, want)) in pages.iter().zip(&expected).enumerate() {
            if m.dim() != Some(*want) {
                r.fail(format!("degree {d} dimension"), json!({ "got": m.dim(), "expected": want }));
            }
            if !m.annihilated_by(&period)? {
                let bad: Vec<String> = m.torsion.iter().map(|g| g.to_string()).collect();
                r.fail(format!("degree {d}: T^N - 1 does not act as zero"), json!({ "invariant_factors": bad }));
            }
        }
    } else {
        r.note("engine", "truncated realization");
        let pages = e2_page(&cx)?;
        for (d, (m, want)) in pages.iter().zip(&expected).enumerate() {
            let g = m.group_type();
            let ok = match ring {
                CoeffRing::Integers => g.torsion_invariants.is_empty() && g.free_rank as u64 == *want,
                CoeffRing::IntegersMod(q) => {
                    g.free_rank == 0
                        && g.torsion_invariants.len() as u64 == *want
                        && g.torsion_invariants.iter().all(|t| *t == BigInt::from(q))
                }
                CoeffRing::Rationals => g.free_rank as u64 == *want,
            };
            r.note(format!("degree {d}"), g.to_string());
            if !ok {
                r.fail(format!("degree {d} group"), json!({ "got": g.to_string(), "expected_rank": want }));
            }
            if m.nilpotency(Variable::T, 1).is_none() {
                r.fail(format!("degree {d}: T^N - 1 does not act as zero"), m.label().to_string());
            }
        }
    }
    Ok(r)
}

/// The homology is nonzero and contains a nonzero class fixed by `U^N`.
/// Over `Z/2` every generator is additionally checked to be `U`-cyclic.
pub fn check_theorem1(spec: &ManifoldSpec) -> Result<CheckReport> {
    let mut r = CheckReport::new("theorem1", spec_params(spec));
    let cx = ChainComplex::build(spec)?;
    let h = homology(&cx, Part::Total)?;
    r.note("homology", h.group_type().to_string());
    if h.is_zero_module() {
        r.fail("homology", "0");
        return Ok(r);
    }
    let w = find_u_cyclic_class(&h)?;
    let n = spec.n_value() as i64;
    let fixed = h.apply_poly(&LaurentPoly::t_pow_minus_one(spec.ring, n), Variable::U, &w.class)?;
    r.note("trail", json!(w.trail));
    r.note("class", w.class.to_string());
    r.note("steps of (U^N - 1)", w.steps);
    if h.is_zero(&w.class)? || !h.is_zero(&fixed)? {
        r.fail("class not fixed by U^N", w.class.to_string());
    }
    if spec.ring == CoeffRing::IntegersMod(2) {
        let mut periods = Vec::new();
        for (i, g) in h.generators().iter().enumerate() {
            let c = is_u_cyclic(&h, g)?;
            match c.k_min() {
                Some(k) => periods.push(k.to_string()),
                None => r.fail(format!("generator {i} is not cyclic"), g.to_string()),
            }
        }
        r.note("generator periods", json!(periods));
    }
    Ok(r)
}

fn spec_params(spec: &ManifoldSpec) -> Value {
    serde_json::to_value(spec).expect("spec serializes")
}

/// First generator not killed by `(1 - U^N)^e`, if any.
fn annihilation_witness(h: &PresentedUModule, e: u32) -> Result<Option<(usize, String)>> {
    let ring = h.ring();
    let n = h.n_value() as i64;
    let p = LaurentPoly::from_int_terms(ring, &[(0, 1), (n, -1)]).pow(e);
    for (i, g) in h.generators().iter().enumerate() {
        let y = h.apply_poly(&p, Variable::U, g)?;
        if !h.is_zero(&y)? {
            return Ok(Some((i, y.to_string())));
        }
    }
    Ok(None)
}

/// `(1 - U^N)^exponent` (default `b1 + 1`) kills every generator of the
/// homology, for `U = T^-1` and for `trials` random filtration-lowering
/// perturbations `U = T^-1 + P`.
pub fn check_annihilation_bound(
    spec: &ManifoldSpec,
    trials: usize,
    exponent: Option<u32>,
    seed: u64,
) -> Result<CheckReport> {
    let e = exponent.unwrap_or(spec.b1 as u32 + 1);
    let mut params = spec_params(spec);
    params["trials"] = json!(trials);
    params["exponent"] = json!(e);
    params["seed"] = json!(seed);
    let mut r = CheckReport::new("annihilation", params);
    let cx = ChainComplex::build(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..=trials {
        let (label, complex) = if trial == 0 {
            ("U = T^-1".to_string(), cx.clone())
        } else {
            let p = random_perturbation(&cx, &mut rng);
            (format!("trial {trial}: U = T^-1 + P ({} entries)", p.nonzero().count()), cx.install_perturbation(p)?)
        };
        let h = homology(&complex, Part::Total)?;
        match annihilation_witness(&h, e)? {
            None => r.note(label, format!("passes on {} generators", h.rank())),
            Some((i, y)) => {
                r.note(label.clone(), format!("generator {i} survives"));
                r.fail(format!("{label}: (1 - U^N)^{e} on generator {i}"), y);
            }
        }
    }
    Ok(r)
}

/// The classes `sigma_i` of the 4x4 cokernel are not `U`-cyclic, are killed
/// by `(T^N - 1)^2`, satisfy `(T^k - 1) sigma_i != 0` for `k <= k_max`, and
/// are pairwise distinct.
pub fn check_theorem2(n: u64, m: i64, i_max: i64, k_max: i64) -> Result<CheckReport> {
    if m == 0 {
        return Err(Error::Hypothesis("the triple cup product m must be nonzero".into()));
    }
    if n == 0 {
        return Err(Error::Hypothesis("N must be positive".into()));
    }
    let mut r = CheckReport::new("theorem2", json!({ "N": n, "m": m, "i_max": i_max, "k_max": k_max }));
    let ring = CoeffRing::Integers;
    let module = cokernel_module(n, m, ring)?;
    r.note("module", module.group_type().to_string());
    let f = LaurentPoly::t_pow_minus_one(ring, n as i64);
    let f2 = f.pow(2);
    let mut sigmas = Vec::new();
    for i in 1..=i_max {
        let s = sigma_class(&module, i)?;
        let c = is_u_cyclic(&module, &s)?;
        if c.is_cyclic() {
            r.fail(format!("sigma_{i} is cyclic"), json!(c));
        } else {
            r.note(
                format!("sigma_{i}"),
                json!({ "verdict": "non_cyclic", "tested_exponent": c.exponent.to_string(), "certificate": c.witness }),
            );
        }
        let y = module.apply_poly(&f2, Variable::T, &s)?;
        if !module.is_zero(&y)? {
            r.fail(format!("(T^N - 1)^2 sigma_{i}"), y.to_string());
        }
        let y = module.apply_poly(&f, Variable::T, &s)?;
        if module.is_zero(&y)? {
            r.fail(format!("(T^N - 1) sigma_{i} vanishes"), s.to_string());
        }
        for k in 1..=k_max {
            let y = module.apply_poly(&LaurentPoly::t_pow_minus_one(ring, k), Variable::T, &s)?;
            if module.is_zero(&y)? {
                r.fail(format!("(T^{k} - 1) sigma_{i} vanishes"), s.to_string());
            }
        }
        sigmas.push(s);
    }
    for i in 0..sigmas.len() {
        for j in i + 1..sigmas.len() {
            if module.class_equal(&sigmas[i], &sigmas[j])? {
                r.fail(format!("sigma_{} = sigma_{}", i + 1, j + 1), sigmas[i].to_string());
            }
        }
    }
    r.note("pairwise distinct", r.passed());
    Ok(r)
}

/// Degree bookkeeping for the periodic Floer form of the bound: requires
/// `d > max(2g - 2, 0)`; passes when `N | d - g + 1`, in which case
/// `(U^N - 1)^(b1+1)` divides `(U^(d-g+1) - 1)^(b1+1)`.
pub fn check_pfh_translation(d: i64, g: i64, b1: u32, n: u64) -> Result<CheckReport> {
    if d <= (2 * g - 2).max(0) {
        return Err(Error::Regime(format!("degree {d} is not greater than max(2g - 2, 0) = {}", (2 * g - 2).max(0))));
    }
    if n == 0 {
        return Err(Error::Hypothesis("N must be positive".into()));
    }
    let mut r = CheckReport::new("pfh-translate", json!({ "d": d, "g": g, "b1": b1, "N": n }));
    let e = d - g + 1;
    r.note("d - g + 1", e);
    r.note("<c1, [Sigma]>", 2 * e);
    let q = CoeffRing::Rationals;
    let target = LaurentPoly::t_pow_minus_one(q, e).pow(b1 + 1);
    r.note("exponent polynomial", format!("(U^{e} - 1)^{}", b1 + 1));
    if e % n as i64 != 0 {
        r.fail(
            "d - g + 1 is not a multiple of N",
            json!({ "d - g + 1": e, "N": n, "remainder": e.rem_euclid(n as i64) }),
        );
        return Ok(r);
    }
    let base = LaurentPoly::t_pow_minus_one(q, n as i64).pow(b1 + 1);
    let (quot, rem) = target.div_rem(&base)?;
    if rem.is_zero() {
        r.note("quotient", quot.to_string().replace('T', "U"));
    } else {
        r.fail("(U^N - 1)^(b1+1) does not divide the exponent polynomial", rem.to_string().replace('T', "U"));
    }
    Ok(r)
}

/// The check names accepted by [`run_named`].
pub const CHECK_NAMES: [&str; 5] = ["lemma-torus", "theorem1", "annihilation", "theorem2", "pfh-translate"];

/// Parameters for [`run_named`]; unused fields are ignored by each check.
#[derive(Clone, Debug)]
pub struct CheckParams {
    pub spec: Option<ManifoldSpec>,
    pub b1: Option<usize>,
    pub n: Option<u64>,
    pub m: Option<i64>,
    pub ring: CoeffRing,
    pub trials: usize,
    pub exponent: Option<u32>,
    pub seed: u64,
    pub i_max: i64,
    pub k_max: i64,
    pub d: Option<i64>,
    pub g: Option<i64>,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            spec: None,
            b1: None,
            n: None,
            m: None,
            ring: CoeffRing::Integers,
            trials: 10,
            exponent: None,
            seed: 0,
            i_max: 6,
            k_max: 24,
            d: None,
            g: None,
        }
    }
}

impl CheckParams {
    /// The given manifold data, else `b1` with `xi = (N, 0, ..., 0)` and the cup
    /// product `m` on the first three indices.
    fn spec_or_default(&self) -> Result<ManifoldSpec> {
        if let Some(s) = &self.spec {
            return Ok(s.clone());
        }
        let b1 = self.b1.unwrap_or(3);
        let n = self.n.unwrap_or(1);
        let mut xi = vec![0; b1];
        if b1 > 0 {
            xi[0] = n as i64;
        }
        let cup3 = match self.m {
            Some(m) if b1 >= 3 => vec![([1, 2, 3], m)],
            _ => Vec::new(),
        };
        ManifoldSpec::new(b1, xi, cup3, self.ring)
    }
}

pub fn run_named(name: &str, p: &CheckParams) -> Result<CheckReport> {
    match name {
        "lemma-torus" => {
            let s = p.spec_or_default()?;
            check_lemma_torus(s.b1, &s.xi, s.ring)
        }
        "theorem1" => check_theorem1(&p.spec_or_default()?),
        "annihilation" => check_annihilation_bound(&p.spec_or_default()?, p.trials, p.exponent, p.seed),
        "theorem2" => check_theorem2(p.n.unwrap_or(1), p.m.unwrap_or(1), p.i_max, p.k_max),
        "pfh-translate" => {
            let d = p.d.ok_or_else(|| Error::InvalidSpec("pfh-translate needs --d".into()))?;
            let g = p.g.ok_or_else(|| Error::InvalidSpec("pfh-translate needs --g".into()))?;
            check_pfh_translation(d, g, p.b1.unwrap_or(1) as u32, p.n.unwrap_or(1))
        }
        other => Err(Error::UnknownCheck(other.into())),
    }
}
