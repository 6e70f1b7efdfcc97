//! Acceptance run: one line per criterion with its verdict, wall time and
//! budget. Exits nonzero when any criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ucycle::complex::{ChainComplex, ManifoldSpec};
use ucycle::linalg::{hermite_normal_form, smith_normal_form, AbelianGroupType, IntMatrix};
use ucycle::ring::{CoeffRing, LaurentPoly};
use ucycle::umodule::pid::field_homology;
use ucycle::umodule::{
    cokernel_module, find_u_cyclic_class, homology, homology_with, is_u_cyclic, sigma_class, HClass, HomologyOptions,
    Part, PresentedUModule, Variable,
};
use ucycle::verify::{check_lemma_torus, check_theorem2};

const CORPUS_SEED: u64 = 1;
const CORPUS_SIZE: usize = 200;
const CORPUS_RINGS: [CoeffRing; 5] = [
    CoeffRing::Integers,
    CoeffRing::Rationals,
    CoeffRing::IntegersMod(2),
    CoeffRing::IntegersMod(3),
    CoeffRing::IntegersMod(6),
];

/// Random specs with `b1 <= 5`, `|xi_i| <= 6`, `|mu| <= 4`.
fn corpus() -> Vec<ManifoldSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|_| {
            let b1 = rng.gen_range(1..=5usize);
            let xi: Vec<i64> = loop {
                let v: Vec<i64> = (0..b1).map(|_| rng.gen_range(-6..=6)).collect();
                if v.iter().any(|&x| x != 0) {
                    break v;
                }
            };
            let mut cup = Vec::new();
            for i in 1..=b1 {
                for j in i + 1..=b1 {
                    for k in j + 1..=b1 {
                        if rng.gen_bool(0.5) {
                            cup.push(([i, j, k], rng.gen_range(-4..=4i64)));
                        }
                    }
                }
            }
            let ring = CORPUS_RINGS[rng.gen_range(0..CORPUS_RINGS.len())];
            ManifoldSpec::new(b1, xi, cup, ring).unwrap()
        })
        .collect()
}

type Outcome = Result<String, String>;

fn run(id: u32, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let r = f();
    let el = t.elapsed();
    let in_time = el <= budget;
    let ok = r.is_ok() && in_time;
    let msg = match &r {
        Ok(s) | Err(s) => s.clone(),
    };
    let timing = if in_time { String::new() } else { " over budget".into() };
    println!(
        "criterion {id} [{}] {title}: {msg} ({:.2}s / {}s{timing})",
        if ok { "PASS" } else { "FAIL" },
        el.as_secs_f64(),
        budget.as_secs()
    );
    ok
}

fn u_fixes(h: &PresentedUModule, k: u64, x: &HClass) -> bool {
    let p = LaurentPoly::t_pow_minus_one(h.ring(), k as i64);
    h.is_zero(&h.apply_poly(&p, Variable::U, x).unwrap()).unwrap()
}

fn criterion1() -> Outcome {
    let mut cases = 0;
    for n in 1..=4u64 {
        for m in (-5..=5i64).filter(|&m| m != 0) {
            let r = check_theorem2(n, m, 6, 24).map_err(|e| format!("N={n} m={m}: {e}"))?;
            if !r.passed() {
                return Err(format!("N={n} m={m}: {:?}", r.witness));
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} (N, m) pairs, sigma_1..sigma_6 non-cyclic, (T^N-1)^2 sigma = 0, k <= 24, distinct"))
}

fn criterion2(corpus: &[ManifoldSpec]) -> Outcome {
    let mut nonzero = 0;
    for (idx, spec) in corpus.iter().enumerate() {
        let cx = ChainComplex::build(spec).map_err(|e| format!("spec {idx}: {e}"))?;
        let h = homology(&cx, Part::Total).map_err(|e| format!("spec {idx}: {e}"))?;
        let ring = spec.ring;
        let n = spec.n_value() as i64;
        let kill = LaurentPoly::from_int_terms(ring, &[(0, 1), (n, -1)]).pow(spec.b1 as u32 + 1);
        for (g, x) in h.generators().iter().enumerate() {
            let y = h.apply_poly(&kill, Variable::U, x).unwrap();
            if !h.is_zero(&y).unwrap() {
                return Err(format!("spec {idx} {spec:?}: generator {g} survives (1-U^N)^(b1+1)"));
            }
        }
        if !h.is_zero_module() {
            nonzero += 1;
            let w = find_u_cyclic_class(&h).map_err(|e| format!("spec {idx}: {e}"))?;
            if h.is_zero(&w.class).unwrap() || !u_fixes(&h, n as u64, &w.class) {
                return Err(format!(
                    "spec {idx} {spec:?}: returned class {} is not a nonzero U^N-fixed class",
                    w.class
                ));
            }
        }
    }
    Ok(format!("{} specs ({nonzero} with nonzero homology)", corpus.len()))
}

fn criterion3() -> Outcome {
    let rings = [CoeffRing::Rationals, CoeffRing::IntegersMod(2), CoeffRing::IntegersMod(3), CoeffRing::IntegersMod(5)];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = 0;
    for b1 in 1..=6usize {
        for n in 1..=5i64 {
            for ring in rings {
                let mut xis = vec![{
                    let mut v = vec![0; b1];
                    v[0] = n;
                    v
                }];
                // A second xi with the same gcd and several nonzero entries.
                let mut v: Vec<i64> = (0..b1).map(|_| n * rng.gen_range(-2..=2)).collect();
                v[0] = n * [1, -1, 3][rng.gen_range(0..3)];
                xis.push(v);
                for xi in xis {
                    let r = check_lemma_torus(b1, &xi, ring).map_err(|e| format!("b1={b1} xi={xi:?} {ring}: {e}"))?;
                    if !r.passed() {
                        return Err(format!("b1={b1} xi={xi:?} {ring}: {:?}", r.witness));
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} cases over Q, Z/2, Z/3, Z/5"))
}

fn criterion4() -> Outcome {
    let ring = CoeffRing::IntegersMod(2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut classes = 0;
    let mut specs = Vec::new();
    for b1 in 1..=5usize {
        for n in 1..=4i64 {
            let mut xi = vec![0; b1];
            xi[0] = n;
            let cup = if b1 >= 3 { vec![([1, 2, 3], 1)] } else { Vec::new() };
            specs.push(ManifoldSpec::new(b1, xi, cup, ring).unwrap());
            let xi: Vec<i64> = (0..b1).map(|i| if i == 0 { n } else { n * rng.gen_range(-1..=2) }).collect();
            let mut cup = Vec::new();
            for i in 1..=b1 {
                for j in i + 1..=b1 {
                    for k in j + 1..=b1 {
                        cup.push(([i, j, k], rng.gen_range(0..=1i64)));
                    }
                }
            }
            specs.push(ManifoldSpec::new(b1, xi, cup, ring).unwrap());
        }
    }
    for spec in &specs {
        let cx = ChainComplex::build(spec).map_err(|e| e.to_string())?;
        let h = homology(&cx, Part::Total).map_err(|e| e.to_string())?;
        let c = usize::BITS - spec.b1.leading_zeros(); // ceil(log2(b1 + 1))
        let bound = BigInt::from(spec.n_value()) * BigInt::from(2u32).pow(c);
        for (g, x) in h.generators().iter().enumerate() {
            let r = is_u_cyclic(&h, x).map_err(|e| e.to_string())?;
            match r.k_min() {
                Some(k) if bound.is_multiple_of(k) => {}
                other => return Err(format!("{spec:?} generator {g}: k_min {other:?} vs bound {bound}")),
            }
            classes += 1;
        }
    }
    Ok(format!("{classes} generators over {} Z/2 specs", specs.len()))
}

/// Least `k <= limit` with `U^k x = x`, stepping through the orbit.
fn orbit_period(h: &PresentedUModule, x: &HClass, limit: u64) -> Option<u64> {
    let mut cur = x.clone();
    for k in 1..=limit {
        cur = h.apply_matrix(h.u_matrix(), &cur).unwrap();
        if h.class_equal(&cur, x).unwrap() {
            return Some(k);
        }
    }
    None
}

fn random_class(h: &PresentedUModule, rng: &mut ChaCha8Rng) -> HClass {
    let coords = h
        .moduli()
        .iter()
        .map(|d| match d.to_i64() {
            Some(0) | None => BigInt::from(rng.gen_range(-3..=3)),
            Some(d) => BigInt::from(rng.gen_range(0..d)),
        })
        .collect();
    h.class_from_coords(coords).unwrap()
}

/// Compares the decision with the orbit; `limit` bounds the orbit search.
fn agree(h: &PresentedUModule, x: &HClass, limit: u64) -> Result<(), String> {
    let r = is_u_cyclic(h, x).map_err(|e| e.to_string())?;
    let orbit = orbit_period(h, x, limit);
    let decided = r.k_min().and_then(|k| k.to_u64());
    if decided != orbit {
        return Err(format!("{}: class {x}: decision {:?}, orbit {:?}", h.label(), r.verdict, orbit));
    }
    Ok(())
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let finite_rings =
        [CoeffRing::IntegersMod(2), CoeffRing::IntegersMod(3), CoeffRing::IntegersMod(4), CoeffRing::IntegersMod(6)];
    let size_cap = BigInt::from(1u32 << 14);
    let mut modules = Vec::new();
    for n in 1..=3u64 {
        for m in 1..=3i64 {
            for ring in finite_rings {
                modules.push(cokernel_module(n, m, ring).unwrap());
            }
        }
    }
    let mut tries = 0;
    while modules.len() < 120 && tries < 2000 {
        tries += 1;
        let b1 = rng.gen_range(1..=4usize);
        let xi: Vec<i64> = (0..b1).map(|_| rng.gen_range(-3..=3)).collect();
        if xi.iter().all(|&x| x == 0) {
            continue;
        }
        let cup: Vec<_> = if b1 >= 3 { vec![([1, 2, 3], rng.gen_range(-2..=2i64))] } else { Vec::new() };
        let ring = finite_rings[rng.gen_range(0..finite_rings.len())];
        let spec = ManifoldSpec::new(b1, xi, cup, ring).unwrap();
        let h = homology(&ChainComplex::build(&spec).unwrap(), Part::Total).map_err(|e| e.to_string())?;
        if !h.is_zero_module() && h.order().is_some_and(|o| o <= size_cap) {
            modules.push(h);
        }
    }
    let mut finite_classes = 0;
    while finite_classes < 10_000 {
        for h in &modules {
            let limit = h.order().unwrap().to_u64().unwrap();
            agree(h, &random_class(h, &mut rng), limit)?;
            finite_classes += 1;
        }
    }

    // Over Z: every instance with at most 12 coordinates, orbit search to a
    // fixed bound well past any period the decision could report.
    let mut z_modules = Vec::new();
    for n in 1..=4u64 {
        for m in [-3, -1, 1, 2, 5] {
            z_modules.push((cokernel_module(n, m, CoeffRing::Integers).unwrap(), true));
        }
    }
    for _ in 0..60 {
        let b1 = rng.gen_range(1..=4usize);
        let xi: Vec<i64> = (0..b1).map(|_| rng.gen_range(-4..=4)).collect();
        if xi.iter().all(|&x| x == 0) {
            continue;
        }
        let cup: Vec<_> = if b1 >= 3 { vec![([1, 2, 3], rng.gen_range(-3..=3i64))] } else { Vec::new() };
        let spec = ManifoldSpec::new(b1, xi, cup, CoeffRing::Integers).unwrap();
        z_modules
            .push((homology(&ChainComplex::build(&spec).unwrap(), Part::Total).map_err(|e| e.to_string())?, false));
    }
    z_modules.retain(|(h, _)| h.rank() <= 12 && !h.is_zero_module());
    let mut z_classes = 0;
    for (h, from_block) in &z_modules {
        let mut xs = h.generators();
        if *from_block {
            for i in 1..=3 {
                xs.push(sigma_class(h, i).unwrap());
            }
        }
        for _ in 0..8 {
            xs.push(random_class(h, &mut rng));
        }
        for x in &xs {
            let r = is_u_cyclic(h, x).map_err(|e| e.to_string())?;
            let bound = (r.exponent.to_u64().unwrap_or(0) * 2).max(240);
            agree(h, x, bound)?;
            z_classes += 1;
        }
    }
    Ok(format!(
        "{finite_classes} classes in {} finite modules (size <= 2^14), {z_classes} classes in {} modules over Z",
        modules.len(),
        z_modules.len()
    ))
}

fn snf_holds(m: &IntMatrix) -> bool {
    let s = smith_normal_form(m);
    let d = s.diagonal();
    let chain =
        d.windows(2).all(|w| w[0].is_zero() && w[1].is_zero() || !w[0].is_zero() && (w[1].clone() % &w[0]).is_zero());
    s.p.mul(m).mul(&s.q) == s.s && chain
}

fn hnf_holds(m: &IntMatrix) -> bool {
    let h = hermite_normal_form(m);
    m.mul(&h.u) == h.h && h.u.determinant().abs().is_one()
}

fn criterion6(corpus: &[ManifoldSpec]) -> Outcome {
    if !cfg!(debug_assertions) {
        return Err("in-engine SNF/HNF identity checks need debug assertions".into());
    }
    let mut identities = 0;
    for (idx, spec) in corpus.iter().enumerate() {
        let cx = ChainComplex::build(spec).map_err(|e| e.to_string())?;
        if !cx.square_is_zero().map_err(|e| e.to_string())? {
            return Err(format!("spec {idx} {spec:?}: (d1 + d3)^2 != 0"));
        }
        for part in [Part::Even, Part::Odd] {
            let at = |p: u32| {
                homology_with(&cx, part, HomologyOptions { power: Some(p), check_stability: false })
                    .map(|h| (h.invariants(p + 2), h))
            };
            let b = spec.b1 as u32;
            let (lo, h) = at(b + 1).map_err(|e| format!("spec {idx}: {e}"))?;
            let (hi, _) = at(b + 2).map_err(|e| format!("spec {idx}: {e}"))?;
            if lo != hi {
                return Err(format!(
                    "spec {idx} {spec:?} {part:?}: invariants differ at powers {} and {}",
                    b + 1,
                    b + 2
                ));
            }
            let rel = h.relations();
            if !(snf_holds(&rel) && hnf_holds(&rel)) {
                return Err(format!("spec {idx}: SNF/HNF identity fails on the relation matrix"));
            }
            identities += 2;
        }
    }
    Ok(format!(
        "(d1+d3)^2 = 0 and powers b1+1, b1+2 agree on {} specs; {identities} explicit SNF/HNF identities plus in-engine checks",
        corpus.len()
    ))
}

fn criterion7(corpus: &[ManifoldSpec]) -> Outcome {
    let fields =
        [CoeffRing::Rationals, CoeffRing::IntegersMod(2), CoeffRing::IntegersMod(3), CoeffRing::IntegersMod(5)];
    let mut cases = 0;
    let mut specs = 0;
    for (idx, spec) in corpus.iter().enumerate().filter(|(_, s)| s.b1 <= 4) {
        specs += 1;
        for k in fields {
            let s = ManifoldSpec { ring: k, ..spec.clone() };
            let cx = ChainComplex::build(&s).map_err(|e| e.to_string())?;
            for part in [Part::Even, Part::Odd] {
                let f = field_homology(&cx, part).map_err(|e| format!("spec {idx} {k}: {e}"))?;
                let t = homology(&cx, part).map_err(|e| format!("spec {idx} {k}: {e}"))?;
                let dim_of = |g: &AbelianGroupType| -> u64 {
                    if k == CoeffRing::Rationals {
                        g.free_rank as u64
                    } else {
                        g.torsion_invariants.len() as u64
                    }
                };
                let limit = spec.b1 as u32 + 2;
                let inv = t.invariants(limit);
                let t_dims: Vec<u64> = inv.filtration_images.iter().map(dim_of).collect();
                let f_dims = f.image_dims(s.n_value(), limit).map_err(|e| e.to_string())?;
                let f_dim = f.dim();
                if f_dim != Some(dim_of(&inv.group)) || f_dims.as_ref() != Some(&t_dims) {
                    return Err(format!(
                        "spec {idx} over {k} {part:?}: Smith form dim {f_dim:?} images {f_dims:?}, truncated dim {} images {t_dims:?}",
                        dim_of(&inv.group)
                    ));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (spec, field, parity) comparisons over {specs} specs with b1 <= 4"))
}

fn main() {
    let corpus = corpus();
    let secs = Duration::from_secs;
    let results = [
        run(1, "non-cyclic classes of the 4x4 cokernel", secs(10), criterion1),
        run(2, "annihilation and U^N-fixed classes on the corpus", secs(60), || criterion2(&corpus)),
        run(3, "d1-homology dimensions N*C(b1-1, d)", secs(30), criterion3),
        run(4, "Z/2 totality", secs(30), criterion4),
        run(5, "decision procedure vs orbit oracles", secs(300), criterion5),
        run(6, "structural invariants", secs(120), || criterion6(&corpus)),
        run(7, "Smith form over k[T, T^-1] vs truncated realization", secs(120), || criterion7(&corpus)),
    ];
    let passed = results.iter().filter(|&&b| b).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
