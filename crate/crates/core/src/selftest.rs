//! The seeded property battery behind `skewrel selftest`.
//!
//! Every suite draws from its own ChaCha8 stream, derived from the seed and
//! the suite's position, so reports are byte-stable for a fixed seed and
//! trial count.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::document::{rel_to_doc, skew_to_doc};
use crate::error::AlgebraError;
use crate::field::FieldSpec;
use crate::fixtures;
use crate::function_algebra::{
    bijection_from_isomorphism, classify_linear_functional, induce_algebra_action, psi_from_bijection,
    recover_set_action, Bijection, FunAlgElement, HomClassification, InducedAlgebraAction, MultiplicativityWitness,
};
use crate::partial_actions::{
    check_free, count_invariant_subsets, enumerate_invariant_subsets, equivalence_classes,
    validate_partial_action, verify_equivalence, Freeness, PartialAction, PartialBijection, Point, Relation,
};
use crate::relation_algebra::{
    brute_force_ideal_span, count_ideals, ideal_closure_of, ideal_from_invariant, rel_convolve, Gamma, RelElement,
};
use crate::sample;
use crate::skew_ring::{skew_add, skew_validate, SkewElement};

pub type SkewMul = fn(&SkewElement, &SkewElement) -> Result<SkewElement, AlgebraError>;

#[derive(Debug, Clone, Copy)]
pub struct SelftestOptions {
    pub seed: u64,
    pub trials: usize,
    /// The product under test; [`crate::skew_ring::skew_mul`] outside fault
    /// injection.
    pub skew_mul: SkewMul,
}

impl SelftestOptions {
    pub fn new(seed: u64, trials: usize) -> Self {
        SelftestOptions { seed, trials, skew_mul: crate::skew_ring::skew_mul }
    }
}

/// A named action with the field it is tested over.
#[derive(Debug, Clone)]
pub struct Target {
    pub name: String,
    pub field: FieldSpec,
    pub action: Arc<PartialAction>,
}

/// `E1` and `E2` over the rationals and `GF(5)`.
pub fn default_targets() -> Vec<Target> {
    let mut out = Vec::new();
    for (name, pa) in [("E1", fixtures::e1()), ("E2", fixtures::e2())] {
        let pa = Arc::new(pa);
        for field in [FieldSpec::Rationals, FieldSpec::prime(5).expect("5 is prime")] {
            out.push(Target { name: name.to_string(), field, action: pa.clone() });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: u64,
    pub failed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetReport {
    pub action: String,
    pub field: String,
    pub suites: Vec<SuiteReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub targets: Vec<TargetReport>,
    pub passed: u64,
    pub failed: u64,
}

impl RunReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

struct Suite {
    report: SuiteReport,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { report: SuiteReport { suite: name, passed: 0, failed: 0, witness: None } }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        if ok {
            self.report.passed += 1;
        } else {
            self.report.failed += 1;
            if self.report.witness.is_none() {
                self.report.witness = Some(witness());
            }
        }
    }

    /// Records `Ok(true)` as a pass, anything else as a failure.
    fn check_result(&mut self, r: Result<bool, AlgebraError>, witness: impl FnOnce() -> Value) {
        match r {
            Ok(ok) => self.check(ok, witness),
            Err(e) => self.check(false, || json!({ "error": e.to_string(), "inputs": witness() })),
        }
    }
}

/// Refuses non-free actions, which have no `F0(R)` product.
pub fn run_selftest(targets: &[Target], opts: &SelftestOptions) -> Result<RunReport, AlgebraError> {
    let mut reports = Vec::with_capacity(targets.len());
    for (i, target) in targets.iter().enumerate() {
        if let Freeness::NotFree { t, point } = check_free(&target.action) {
            return Err(AlgebraError::NotFree(format!(
                "{}: h_{} fixes {}",
                target.name,
                target.action.group().format(t),
                target.action.carrier().label(point)
            )));
        }
        reports.push(run_target(target, opts, i as u64)?);
    }
    let passed = reports.iter().flat_map(|t| &t.suites).map(|s| s.passed).sum();
    let failed = reports.iter().flat_map(|t| &t.suites).map(|s| s.failed).sum();
    Ok(RunReport { command: "selftest", seed: opts.seed, trials: opts.trials, targets: reports, passed, failed })
}

struct Ctx<'a> {
    opts: &'a SelftestOptions,
    pa: &'a Arc<PartialAction>,
    field: FieldSpec,
    alpha: Arc<InducedAlgebraAction>,
    gamma: Gamma,
    relation: Arc<Relation>,
}

impl Ctx<'_> {
    fn mul(&self, u: &SkewElement, v: &SkewElement) -> Result<SkewElement, AlgebraError> {
        (self.opts.skew_mul)(u, v)
    }

    fn skew_json(&self, u: &SkewElement) -> Value {
        serde_json::to_value(skew_to_doc(u)).expect("serializable")
    }

    fn rel_json(&self, f: &RelElement) -> Value {
        serde_json::to_value(rel_to_doc(f)).expect("serializable")
    }

    fn fun_json(&self, f: &FunAlgElement) -> Value {
        let c = self.pa.carrier();
        let m: serde_json::Map<String, Value> =
            f.coeffs().map(|(x, k)| (c.label(x).to_string(), Value::String(k.to_string()))).collect();
        Value::Object(m)
    }
}

type SuiteFn = fn(&Ctx<'_>, &mut ChaCha8Rng, &mut Suite);

const SUITES: &[(&str, SuiteFn)] = &[
    ("axioms", suite_axioms),
    ("freeness", suite_freeness),
    ("relation", suite_relation),
    ("skew_closure", suite_skew_closure),
    ("skew_ring_laws", suite_skew_ring_laws),
    ("skew_associativity", suite_skew_associativity),
    ("rel_associativity", suite_rel_associativity),
    ("gamma", suite_gamma),
    ("ideals", suite_ideals),
    ("round_trips", suite_round_trips),
    ("classification", suite_classification),
];

fn run_target(target: &Target, opts: &SelftestOptions, index: u64) -> Result<TargetReport, AlgebraError> {
    let alpha = Arc::new(induce_algebra_action(target.action.clone(), target.field)?);
    let gamma = Gamma::new(alpha.clone())?;
    let relation = gamma.relation().clone();
    let ctx = Ctx { opts, pa: &target.action, field: target.field, alpha, gamma, relation };
    let mut suites = Vec::with_capacity(SUITES.len());
    for (j, (name, run)) in SUITES.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(index * 64 + j as u64);
        let mut suite = Suite::new(name);
        run(&ctx, &mut rng, &mut suite);
        suites.push(suite.report);
    }
    Ok(TargetReport { action: target.name.clone(), field: target.field.to_string(), suites })
}

fn suite_axioms(ctx: &Ctx<'_>, _: &mut ChaCha8Rng, s: &mut Suite) {
    let report = validate_partial_action(&ctx.pa.to_data());
    s.check(report.is_ok(), || json!(report.to_string()));
    let algebra = ctx.alpha.check_axioms();
    s.check(algebra.is_ok(), || json!(format!("{:?}", algebra)));
}

fn suite_freeness(ctx: &Ctx<'_>, _: &mut ChaCha8Rng, s: &mut Suite) {
    s.check(check_free(ctx.pa) == Freeness::Free, || json!("fixed point"));
    s.check(ctx.relation.is_free(), || json!("pair with several witnesses"));
}

fn suite_relation(ctx: &Ctx<'_>, _: &mut ChaCha8Rng, s: &mut Suite) {
    let r = &ctx.relation;
    s.check(verify_equivalence(r), || json!("not an equivalence relation"));
    let Ok(classes) = equivalence_classes(r) else {
        s.check(false, || json!("no classes"));
        return;
    };
    let covered: usize = classes.blocks.iter().map(Vec::len).sum();
    s.check(covered == ctx.pa.carrier().len(), || json!("classes do not partition X"));
    let expected_pairs: usize = classes.blocks.iter().map(|b| b.len() * b.len()).sum();
    s.check(expected_pairs == r.len(), || json!({ "pairs": r.len(), "sum of squares": expected_pairs }));
    let count = count_invariant_subsets(r).map(|n| n == BigUint::from(1u32) << classes.len());
    s.check(count == Ok(true), || json!("invariant subset count is not 2^k"));
}

fn suite_skew_closure(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng, s: &mut Suite) {
    for _ in 0..ctx.opts.trials {
        let u = sample::skew_element(rng, &ctx.alpha);
        let v = sample::skew_element(rng, &ctx.alpha);
        let r = ctx.mul(&u, &v).map(|uv| skew_validate(&uv));
        s.check_result(r, || json!({ "u": ctx.skew_json(&u), "v": ctx.skew_json(&v) }));
    }
}

fn suite_skew_ring_laws(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng, s: &mut Suite) {
    let one = SkewElement::one(ctx.alpha.clone());
    for _ in 0..ctx.opts.trials {
        let u = sample::skew_element(rng, &ctx.alpha);
        let v = sample::skew_element(rng, &ctx.alpha);
        let w = sample::skew_element(rng, &ctx.alpha);
        let k = sample::nonzero_scalar(rng, ctx.field);
        let inputs = || json!({ "u": ctx.skew_json(&u), "v": ctx.skew_json(&v), "w": ctx.skew_json(&w), "k": k.to_string() });
        let laws = (|| -> Result<bool, AlgebraError> {
            let uv = ctx.mul(&u, &v)?;
            let left = ctx.mul(&u, &skew_add(&v, &w)?)? == skew_add(&uv, &ctx.mul(&u, &w)?)?;
            let right = ctx.mul(&skew_add(&u, &v)?, &w)? == skew_add(&ctx.mul(&u, &w)?, &ctx.mul(&v, &w)?)?;
            let scalar = ctx.mul(&u.scale(&k)?, &v)? == uv.scale(&k)? && ctx.mul(&u, &v.scale(&k)?)? == uv.scale(&k)?;
            let unit = ctx.mul(&u, &one)? == u && ctx.mul(&one, &u)? == u;
            Ok(left && right && scalar && unit)
        })();
        s.check_result(laws, inputs);
    }
}

/// Each single-coefficient piece of `u`, and the same piece with coefficient 1.
fn skew_pieces(u: &SkewElement) -> Vec<SkewElement> {
    let mut out = Vec::new();
    for (t, f) in u.terms() {
        for (x, k) in f.coeffs() {
            let c = u.alpha().carrier().clone();
            let field = u.alpha().field();
            for k in [field.one(), k.clone()] {
                let g = FunAlgElement::from_coeffs(c.clone(), field, [(x, k)]).expect("point of the carrier");
                out.push(SkewElement::monomial(u.alpha().clone(), t, g).expect("piece of a valid element"));
            }
        }
    }
    out
}

fn rel_pieces(f: &RelElement) -> Vec<RelElement> {
    let mut out = Vec::new();
    for (p, k) in f.coeffs() {
        for k in [f.field().one(), k.clone()] {
            out.push(RelElement::new(f.relation().clone(), f.field(), [(p, k)]).expect("pair of the relation"));
        }
    }
    out
}

/// Greedily replaces an entry by one of its pieces while `fails` still holds
/// and `size` strictly drops.
fn shrink<T: Clone>(
    mut items: Vec<T>,
    pieces: impl Fn(&T) -> Vec<T>,
    size: impl Fn(&T) -> (usize, usize),
    fails: impl Fn(&[T]) -> bool,
) -> Vec<T> {
    'outer: loop {
        for i in 0..items.len() {
            for p in pieces(&items[i]) {
                if size(&p) >= size(&items[i]) {
                    continue;
                }
                let mut candidate = items.clone();
                candidate[i] = p;
                if fails(&candidate) {
                    items = candidate;
                    continue 'outer;
                }
            }
        }
        return items;
    }
}

/// Number of coefficients, then number of coefficients other than 1.
fn skew_size(u: &SkewElement) -> (usize, usize) {
    let ks: Vec<_> = u.terms().flat_map(|(_, f)| f.coeffs().map(|(_, k)| k.is_one())).collect();
    (ks.len(), ks.iter().filter(|one| !**one).count())
}

fn rel_size(f: &RelElement) -> (usize, usize) {
    let n = f.coeffs().count();
    (n, f.coeffs().filter(|(_, k)| !k.is_one()).count())
}

fn suite_skew_associativity(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng, s: &mut Suite) {
    let assoc = |t: &[SkewElement]| -> Result<bool, AlgebraError> {
        Ok(ctx.mul(&ctx.mul(&t[0], &t[1])?, &t[2])? == ctx.mul(&t[0], &ctx.mul(&t[1], &t[2])?)?)
    };
    for _ in 0..ctx.opts.trials {
        let triple: Vec<SkewElement> = (0..3).map(|_| sample::skew_element(rng, &ctx.alpha)).collect();
        let r = assoc(&triple);
        s.check_result(r, || {
            let minimal = shrink(triple.clone(), skew_pieces, skew_size, |t| !matches!(assoc(t), Ok(true)));
            let show = |x: &SkewElement| ctx.skew_json(x);
            let lhs = ctx.mul(&minimal[0], &minimal[1]).and_then(|ab| ctx.mul(&ab, &minimal[2]));
            let rhs = ctx.mul(&minimal[1], &minimal[2]).and_then(|bc| ctx.mul(&minimal[0], &bc));
            json!({
                "u": show(&minimal[0]),
                "v": show(&minimal[1]),
                "w": show(&minimal[2]),
                "(uv)w": lhs.map(|x| show(&x)).unwrap_or_else(|e| json!(e.to_string())),
                "u(vw)": rhs.map(|x| show(&x)).unwrap_or_else(|e| json!(e.to_string())),
            })
        });
    }
}

fn suite_rel_associativity(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng, s: &mut Suite) {
    let assoc = |t: &[RelElement]| -> Result<bool, AlgebraError> {
        Ok(rel_convolve(&rel_convolve(&t[0], &t[1])?, &t[2])? == rel_convolve(&t[0], &rel_convolve(&t[1], &t[2])?)?)
    };
    for _ in 0..ctx.opts.trials {
        let triple: Vec<RelElement> = (0..3).map(|_| sample::rel_element(rng, &ctx.relation, ctx.field)).collect();
        let r = assoc(&triple);
        s.check_result(r, || {
            let minimal = shrink(triple.clone(), rel_pieces, rel_size, |t| !matches!(assoc(t), Ok(true)));
            json!({ "f": ctx.rel_json(&minimal[0]), "g": ctx.rel_json(&minimal[1]), "h": ctx.rel_json(&minimal[2]) })
        });
    }
}

fn suite_gamma(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng, s: &mut Suite) {
    let g = &ctx.gamma;
    for _ in 0..ctx.opts.trials {
        let u = sample::skew_element(rng, &ctx.alpha);
        let v = sample::skew_element(rng, &ctx.alpha);
        let f = sample::rel_element(rng, &ctx.relation, ctx.field);
        let k = sample::nonzero_scalar(rng, ctx.field);
        let inputs = || json!({ "u": ctx.skew_json(&u), "v": ctx.skew_json(&v), "f": ctx.rel_json(&f), "k": k.to_string() });
        let laws = (|| -> Result<bool, AlgebraError> {
            let (gu, gv) = (g.apply(&u)?, g.apply(&v)?);
            let mult = g.apply(&ctx.mul(&u, &v)?)? == rel_convolve(&gu, &gv)?;
            let add = g.apply(&skew_add(&u, &v)?)? == gu.add(&gv)?;
            let scale = g.apply(&u.scale(&k)?)? == gu.scale(&k)?;
            let back = g.invert(&gu)? == u;
            let forth = g.apply(&g.invert(&f)?)? == f;
            Ok(mult && add && scale && back && forth)
        })();
        s.check_result(laws, inputs);
    }
}

fn suite_ideals(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng, s: &mut Suite) {
    let r = &ctx.relation;
    let lattice = (|| -> Result<bool, AlgebraError> {
        let subsets = enumerate_invariant_subsets(r)?;
        let ideals = subsets.iter().map(|z| ideal_from_invariant(r, z)).collect::<Result<Vec<_>, _>>()?;
        let count = BigUint::from(ideals.len()) == count_ideals(r)?;
        let mut ok = count;
        for (z1, i1) in subsets.iter().zip(&ideals) {
            for (z2, i2) in subsets.iter().zip(&ideals) {
                let contained = i1.basis.iter().all(|p| i2.basis.contains(p));
                ok &= z1.members.is_subset(&z2.members) == contained;
                ok &= (z1 == z2) == (i1.basis == i2.basis);
            }
        }
        Ok(ok)
    })();
    s.check_result(lattice, || json!("lattice law"));
    let mut done = 0;
    while done < ctx.opts.trials {
        let f = sample::rel_element(rng, r, ctx.field);
        if f.is_zero() {
            continue;
        }
        done += 1;
        let agree = (|| -> Result<bool, AlgebraError> {
            let ideal = ideal_from_invariant(r, &ideal_closure_of(&f)?)?;
            Ok(brute_force_ideal_span(r, ctx.field, std::slice::from_ref(&f))? == ideal.span(r, ctx.field))
        })();
        s.check_result(agree, || json!({ "f": ctx.rel_json(&f) }));
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn suite_round_trips(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng, s: &mut Suite) {
    let back = ctx
        .alpha
        .to_family()
        .and_then(|fam| recover_set_action(&fam))
        .map(|theta| theta == **ctx.pa);
    s.check_result(back, || json!("θ -> α -> θ"));

    let c = ctx.pa.carrier();
    let n = c.len();
    let perms: Vec<Vec<usize>> = if n <= 5 {
        permutations(n)
    } else {
        (0..ctx.opts.trials)
            .map(|_| {
                let mut p: Vec<usize> = (0..n).collect();
                p.shuffle(rng);
                p
            })
            .collect()
    };
    let bij = |p: &[usize]| {
        let map = PartialBijection::new(p.iter().enumerate().map(|(i, &j)| (Point(i), Point(j)))).expect("permutation");
        Bijection::total(c.clone(), c.clone(), map).expect("permutation of the carrier")
    };
    for p in &perms {
        let h = bij(p);
        let r = bijection_from_isomorphism(&psi_from_bijection(&h, ctx.field)).map(|h2| h2 == h);
        s.check_result(r, || json!({ "h": p }));
    }
    for _ in 0..ctx.opts.trials.min(perms.len() * perms.len()) {
        let (Some(p), Some(q)) = (perms.choose(rng), perms.choose(rng)) else { break };
        let qp: Vec<usize> = p.iter().map(|&i| q[i]).collect();
        let r = psi_from_bijection(&bij(p), ctx.field)
            .compose(&psi_from_bijection(&bij(q), ctx.field))
            .map(|lhs| lhs == psi_from_bijection(&bij(&qp), ctx.field));
        s.check_result(r, || json!({ "h": p, "g": q }));
    }
}

/// `φ` is a homomorphism iff `φ(δ_x δ_y) = φ(δ_x) φ(δ_y)` for all `x, y`.
fn multiplicative_on_basis(phi: &FunAlgElement) -> bool {
    let pts: Vec<Point> = phi.carrier().points().collect();
    pts.iter().all(|&x| {
        pts.iter().all(|&y| {
            let prod = if x == y { phi.get(x) } else { phi.field().zero() };
            prod == &phi.get(x) * &phi.get(y)
        })
    })
}

fn suite_classification(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng, s: &mut Suite) {
    let c = ctx.pa.carrier();
    for x in c.points() {
        let d = FunAlgElement::delta(c.clone(), ctx.field, x).expect("point");
        s.check(classify_linear_functional(&d) == HomClassification::Evaluation(x), || json!({ "x": c.label(x) }));
    }
    let zero = FunAlgElement::zero(c.clone(), ctx.field);
    s.check(classify_linear_functional(&zero) == HomClassification::Zero, || json!("zero functional"));
    for _ in 0..ctx.opts.trials {
        let phi = sample::fun_element(rng, c, ctx.field);
        let hom = multiplicative_on_basis(&phi);
        let ok = match classify_linear_functional(&phi) {
            HomClassification::Zero => phi.is_zero(),
            HomClassification::Evaluation(x) => hom && phi.support() == BTreeSet::from([x]) && phi.get(x).is_one(),
            HomClassification::NotMultiplicative(MultiplicativityWitness::Pair(x, y)) => {
                !hom && x != y && !(&phi.get(x) * &phi.get(y)).is_zero()
            }
            HomClassification::NotMultiplicative(MultiplicativityWitness::NotIdempotent(x)) => {
                !hom && &phi.get(x) * &phi.get(x) != phi.get(x)
            }
        };
        s.check(ok, || json!({ "phi": ctx.fun_json(&phi) }));
    }
}

/// `u v + u`, a non-associative product for fault injection.
pub fn corrupted_skew_mul(u: &SkewElement, v: &SkewElement) -> Result<SkewElement, AlgebraError> {
    skew_add(&crate::skew_ring::skew_mul(u, v)?, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_battery_passes() {
        let report = run_selftest(&default_targets(), &SelftestOptions::new(42, 20)).unwrap();
        assert!(report.ok(), "{}", serde_json::to_string_pretty(&report).unwrap());
        assert!(report.passed > 0);
    }

    #[test]
    fn reports_are_deterministic() {
        let opts = SelftestOptions::new(7, 10);
        let a = serde_json::to_string(&run_selftest(&default_targets(), &opts).unwrap()).unwrap();
        let b = serde_json::to_string(&run_selftest(&default_targets(), &opts).unwrap()).unwrap();
        assert_eq!(a, b);
        let c = serde_json::to_string(&run_selftest(&default_targets(), &SelftestOptions::new(8, 10)).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn corrupted_product_fails_associativity_with_small_witness() {
        let opts = SelftestOptions { skew_mul: corrupted_skew_mul, ..SelftestOptions::new(42, 50) };
        let report = run_selftest(&default_targets(), &opts).unwrap();
        assert!(!report.ok());
        let suite = report.targets[0].suites.iter().find(|s| s.suite == "skew_associativity").unwrap();
        assert!(suite.failed > 0);
        let w = suite.witness.as_ref().unwrap();
        for key in ["u", "v", "w"] {
            let terms = w[key].as_array().unwrap();
            assert_eq!(terms.len(), 1, "{w}");
            assert_eq!(terms[0]["coeffs"].as_object().unwrap().len(), 1, "{w}");
        }
    }

    #[test]
    fn non_free_targets_are_refused() {
        let t = Target { name: "mutant".into(), field: FieldSpec::Rationals, action: Arc::new(fixtures::e1_fixing_c()) };
        assert!(matches!(run_selftest(&[t], &SelftestOptions::new(1, 1)), Err(AlgebraError::NotFree(_))));
    }
}
