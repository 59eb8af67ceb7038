//! Acceptance suite: thirteen criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout; the
//! process exits non-zero when any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{fixture, fixtures_in, load_channel, load_semigroup, random_pipeline, random_rate_case, random_stochastic_case};
use nalgebra::DMatrix;
use noetherq::channels::{positivity_profile, schwarz_defect, stinespring_dilation, transpose_map, KPositivity, Picture};
use noetherq::classical::{
    classical_noether_continuous, classical_noether_discrete, embed_diagonal, ClassicalChain, Embedding, ObservableVector,
    CONTINUOUS_CORRESPONDENCE, DISCRETE_CORRESPONDENCE,
};
use noetherq::cli::format::{load_json, parse_chain, parse_classical_observable};
use noetherq::fixed::{bimodule_domain, constants_scale, fixed_point_space, multiplicative_domain, noether_discrete, noether_measurement};
use noetherq::linalg::{diag, identity, matrix_unit, r, OperatorExt};
use noetherq::random::{random_block_lindblad, random_lindblad, random_operator, random_structured_unital_cp, rng, Rng64};
use noetherq::semigroup::{
    conditional_expectation_check, constants_of_motion, ergodic_projection_continuous, ergodic_projection_discrete, evolve, growth_bound,
    yosida_approx, SemigroupSpec,
};
use noetherq::{AnalysisOptions, Operator, OperatorSubspace, SuperOperator, Tolerances};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn opts() -> AnalysisOptions {
    AnalysisOptions::default()
}

/// Heisenberg-picture unital CP maps with `d` cycling through 2, 3, 4.
fn unital_cp_suite(seed: u64, count: usize) -> Vec<SuperOperator> {
    let mut g = rng(seed);
    (0..count).map(|i| random_structured_unital_cp(&mut g, 2 + i % 3).to_super()).collect()
}

fn matrix_units(d: usize) -> Vec<Operator> {
    (0..d).flat_map(|i| (0..d).map(move |j| matrix_unit(d, i, j))).collect()
}

fn schwarz_inequality() -> Outcome {
    let t = tol();
    let mut g = rng(1);
    let mut worst = f64::INFINITY;
    for (k, phi) in unital_cp_suite(1, 100).iter().enumerate() {
        for _ in 0..10 {
            let a = random_operator(&mut g, phi.dim());
            let me = schwarz_defect(phi, &a, &t).map_err(|e| format!("map {k}: {e}"))?.min_eigenvalue();
            worst = worst.min(me);
            ensure(me >= -1e-9, || format!("map {k}: defect eigenvalue {me:.3e}"))?;
        }
    }
    Ok(format!("1000 defects, min eigenvalue {worst:.3e}"))
}

fn multiplicativity_propagation() -> Outcome {
    let t = tol();
    let mut g = rng(1);
    let (mut tested, mut worst) = (0usize, 0.0f64);
    for (k, phi) in unital_cp_suite(1, 100).iter().enumerate() {
        let d = phi.dim();
        let mut candidates: Vec<Operator> = (0..10).map(|_| random_operator(&mut g, d)).collect();
        candidates.extend(fixed_point_space(phi, &t).canonical_elements());
        candidates.extend(multiplicative_domain(phi, &t).map_err(|e| e.to_string())?.basis().iter().cloned());
        for a in candidates {
            let a = &a * r(1.0 / a.norm().max(f64::MIN_POSITIVE));
            let defect = schwarz_defect(phi, &a, &t).map_err(|e| e.to_string())?.norm();
            if defect > 1e-9 {
                continue;
            }
            tested += 1;
            let pa = phi.apply(&a).map_err(|e| e.to_string())?;
            for b in matrix_units(d) {
                let lhs = phi.apply(&(&b * &a)).map_err(|e| e.to_string())?;
                let res = (lhs - phi.apply(&b).map_err(|e| e.to_string())? * &pa).norm();
                worst = worst.max(res);
                ensure(res <= 1e-8, || format!("map {k}: residual {res:.3e} for an element with defect {defect:.1e}"))?;
            }
        }
    }
    ensure(tested > 0, || "no element with vanishing defect was found".into())?;
    Ok(format!("{tested} elements with vanishing defect, max residual {worst:.3e}"))
}

fn structure_identity() -> Outcome {
    let t = tol();
    let mut worst = 0.0f64;
    let mut dims = Vec::new();
    for (k, phi) in unital_cp_suite(3, 50).iter().enumerate() {
        let fix = fixed_point_space(phi, &t);
        let mult = multiplicative_domain(phi, &t).map_err(|e| e.to_string())?;
        let inter = fix.intersect(&mult).map_err(|e| e.to_string())?;
        let bim = bimodule_domain(phi, &t);
        ensure(bim.len() == inter.len(), || format!("map {k}: dim bimodule {} vs dim intersection {}", bim.len(), inter.len()))?;
        let res = bim.containment_residual_in(&inter).max(inter.containment_residual_in(&bim));
        // direct bimodule property on the basis
        for a in bim.basis() {
            for b in matrix_units(phi.dim()) {
                let r1 = (phi.apply(&(a * &b)).unwrap() - a * phi.apply(&b).unwrap()).norm();
                let r2 = (phi.apply(&(&b * a)).unwrap() - phi.apply(&b).unwrap() * a).norm();
                worst = worst.max(r1).max(r2);
                ensure(r1.max(r2) <= 1e-8, || format!("map {k}: bimodule property residual {:.3e}", r1.max(r2)))?;
            }
        }
        worst = worst.max(res);
        ensure(res <= 1e-8, || format!("map {k}: mutual containment residual {res:.3e}"))?;
        dims.push(bim.len());
    }
    let nontrivial = dims.iter().filter(|&&n| n > 1).count();
    Ok(format!("50 maps ({nontrivial} with non-scalar bimodule domain), max residual {worst:.3e}"))
}

fn scale_collapse() -> Outcome {
    let t = tol();
    let mut worst = 0.0f64;
    let mut non_algebra = 0;
    for (k, phi) in unital_cp_suite(3, 50).iter().enumerate() {
        let rep = constants_scale(phi, &t).map_err(|e| e.to_string())?;
        let c2 = &rep.constants2;
        if !rep.fix_is_algebra {
            non_algebra += 1;
        }
        for x in c2.basis() {
            let star = c2.residual(&x.adjoint());
            worst = worst.max(star);
            ensure(star <= 1e-8, || format!("map {k}: adjoint residual {star:.3e}"))?;
            for y in c2.basis() {
                let prod = c2.residual(&(x * y));
                worst = worst.max(prod);
                ensure(prod <= 1e-8, || format!("map {k}: product residual {prod:.3e}"))?;
            }
        }
        ensure(rep.fix_is_algebra == (rep.fix.len() == c2.len()), || format!("map {k}: fix_is_algebra disagrees with dimensions"))?;
    }
    Ok(format!("50 maps ({non_algebra} with non-algebraic fixed space), max residual {worst:.3e}"))
}

/// `X ↦ PXP + (x11 + x22)/2 · E33` written out entry by entry.
fn m3_by_hand(x: &Operator) -> Operator {
    let mut y = Operator::zeros(3, 3);
    for i in 0..2 {
        for j in 0..2 {
            y[(i, j)] = x[(i, j)];
        }
    }
    y[(2, 2)] = (x[(0, 0)] + x[(1, 1)]) * r(0.5);
    y
}

fn m3_discrete() -> Outcome {
    let t = tol();
    let phi = load_channel(&fixture("channels/m3_heisenberg.json"), &t).in_picture(Picture::Heisenberg, &t).map_err(|e| e.to_string())?;
    for x in matrix_units(3) {
        let res = (phi.apply(&x).unwrap() - m3_by_hand(&x)).norm();
        ensure(res <= 1e-10, || format!("fixture differs from the hand formula by {res:.3e}"))?;
    }
    // fixed points by hand: the upper 2x2 block with x33 its half-trace
    let fixed = [
        diag(&[1.0, 0.0, 0.5]),
        diag(&[0.0, 1.0, 0.5]),
        matrix_unit(3, 0, 1),
        matrix_unit(3, 1, 0),
    ];
    for f in &fixed {
        ensure((m3_by_hand(f) - f).norm() <= 1e-15, || "hand fixed point is not fixed".into())?;
    }
    let oracle = OperatorSubspace::span(3, &fixed, t);
    let rep = constants_scale(&phi, &t).map_err(|e| e.to_string())?;
    ensure(rep.fix.len() == 4, || format!("fix dim {}", rep.fix.len()))?;
    ensure(rep.constants2.len() == 1, || format!("constants2 dim {}", rep.constants2.len()))?;
    ensure(!rep.fix_is_algebra, || "fix reported as an algebra".into())?;
    let dist = rep.fix.distance(&oracle);
    ensure(dist <= 1e-10, || format!("fix differs from the hand fixed space by {dist:.3e}"))?;
    let scal = rep.constants2.residual(&identity(3));
    ensure(scal <= 1e-10, || format!("identity residual in constants2 {scal:.3e}"))?;
    let a = diag(&[1.0, 0.0, 0.5]);
    let a2 = &a * &a;
    let want_a2 = diag(&[1.0, 0.0, 0.25]);
    let want_phi_a2 = diag(&[1.0, 0.0, 0.5]);
    let residuals = [
        (phi.apply(&a).unwrap() - &a).norm(),
        (&a2 - &want_a2).norm(),
        (phi.apply(&a2).unwrap() - &want_phi_a2).norm(),
        (m3_by_hand(&a2) - &want_phi_a2).norm(),
    ];
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    ensure(worst <= 1e-10, || format!("witness residuals {residuals:?}"))?;
    let gap = (phi.apply(&a2).unwrap() - &a2).norm();
    ensure(gap >= 0.2, || format!("A^2 unexpectedly fixed (gap {gap:.3e})"))?;
    let witness_ok = rep.witnesses.iter().any(|w| {
        let w = w / w[(0, 0)];
        (w - &a).norm() <= 1e-10
    });
    ensure(witness_ok, || format!("reported witnesses {:?} do not include diag(1,0,1/2)", rep.witnesses.len()))?;
    Ok(format!("fix 4, constants2 1, |Phi(A^2) - A^2| = {gap:.4}, max residual {worst:.1e}"))
}

fn m3_continuous() -> Outcome {
    let t = tol();
    let mut o = opts();
    o.times = vec![0.1, 1.0, 10.0];
    let spec = load_semigroup(&fixture("lindblad/m3_minus_identity.json"), &t).with_times(o.times.clone());
    let phi = load_channel(&fixture("lindblad/m3_minus_identity.json"), &t).in_picture(Picture::Heisenberg, &t).map_err(|e| e.to_string())?;
    let fix = fixed_point_space(&phi, &t);
    let com = constants_of_motion(&spec, &o).map_err(|e| e.to_string())?;
    let d0 = com.subspace.distance(&fix);
    ensure(d0 <= 1e-8, || format!("ker vs discrete fix distance {d0:.3e}"))?;
    for (time, dist) in &com.time_checks {
        ensure(*dist <= 1e-8, || format!("t = {time}: distance {dist:.3e}"))?;
    }
    ensure(com.time_checks.len() == 3, || "missing time checks".into())?;
    let gen = spec.heisenberg(&t).map_err(|e| e.to_string())?;
    let a = diag(&[1.0, 0.0, 0.5]);
    let ra = gen.apply(&a).unwrap().norm();
    let ra2 = gen.apply(&(&a * &a)).unwrap().norm();
    ensure(ra <= 1e-10, || format!("A not in kernel: {ra:.3e}"))?;
    ensure(ra2 >= 0.1, || format!("A^2 in kernel: {ra2:.3e}"))?;
    let worst = com.time_checks.iter().map(|c| c.1).fold(d0, f64::max);
    Ok(format!("ker dim {}, max distance {worst:.3e}, |psi#(A^2)| = {ra2:.4}", com.subspace.len()))
}

fn transpose_classification() -> Outcome {
    let t = tol();
    let tau = transpose_map(2).map_err(|e| e.to_string())?;
    let prof = positivity_profile(&tau, 2, 10_000, &t, 7);
    let choi = prof.choi_min_eigenvalue;
    ensure((choi + 1.0).abs() <= 1e-12, || format!("Choi min eigenvalue {choi}"))?;
    ensure(!prof.completely_positive, || "reported CP".into())?;
    match &prof.k_positivity[0] {
        KPositivity::NoViolationFound { samples, min_eigenvalue_seen, .. } => {
            ensure(*samples == 10_000, || format!("{samples} samples"))?;
            ensure(*min_eigenvalue_seen >= -t.psd_tol, || "negative eigenvalue seen".into())?
        }
        KPositivity::Violated { min_eigenvalue, .. } => return Err(format!("positivity violated ({min_eigenvalue:.3e})")),
    }
    match &prof.k_positivity[1] {
        KPositivity::Violated { canonical: true, min_eigenvalue, witness, .. } => {
            // the witness [E_ij] maps to [E_ji], the swap, with eigenvalue -1
            ensure((min_eigenvalue + 1.0).abs() <= 1e-12, || format!("witness eigenvalue {min_eigenvalue}"))?;
            ensure(witness.min_eigenvalue() >= -1e-12, || "witness is not PSD".into())?;
        }
        other => return Err(format!("2-positivity not refuted by the matrix-unit witness: {other:?}")),
    }
    Ok(format!("positive on 10000 samples, Choi min eigenvalue {choi:.12}, 2-positivity violated"))
}

fn measurement_compatibility() -> Outcome {
    let t = tol();
    let mut g = rng(8);
    let mut conserved = 0;
    for k in 0..20 {
        let d = 2 + k % 2;
        let (psi, a) = random_pipeline(&mut g, d, &t);
        let v = noether_measurement(&psi, &a, &opts()).map_err(|e| format!("trial {k}: {e}"))?;
        ensure(v.consistent, || format!("trial {k}: groups {:?} disagree", v.inconsistent_groups()))?;
        if v.holds("Psi#(A)=A and Psi#(A^2)=A^2") {
            conserved += 1;
        }
    }
    ensure(conserved > 0 && conserved < 20, || format!("degenerate suite: {conserved} of 20 conserved"))?;
    Ok(format!("20 pipelines consistent ({conserved} with A conserved)"))
}

fn check_projection(p: &SuperOperator, fix: &OperatorSubspace, label: &str) -> Result<f64, String> {
    let t = tol();
    let d = p.dim();
    let idem = (p.matrix() * p.matrix() - p.matrix()).norm();
    let unit = (p.apply(&identity(d)).unwrap() - identity(d)).norm();
    let choi = p.choi_min_eigenvalue();
    let range = OperatorSubspace::span(d, &matrix_units(d).iter().map(|x| p.apply(x).unwrap()).collect::<Vec<_>>(), t);
    let dist = range.distance(fix);
    ensure(idem <= 1e-8, || format!("{label}: |P^2 - P| = {idem:.3e}"))?;
    ensure(unit <= 1e-8, || format!("{label}: |P(I) - I| = {unit:.3e}"))?;
    ensure(choi >= -1e-8, || format!("{label}: Choi eigenvalue {choi:.3e}"))?;
    ensure(range.len() == fix.len() && dist <= 1e-8, || format!("{label}: range dim {} vs {}, distance {dist:.3e}", range.len(), fix.len()))?;
    let ce = conditional_expectation_check(p, &t).map_err(|e| format!("{label}: {e}"))?;
    let closed = fix.is_algebra();
    ensure(ce.passes == closed, || format!("{label}: conditional expectation {} but fixed space closed = {closed}", ce.passes))?;
    Ok(idem.max(unit).max(dist).max(-choi.min(0.0)))
}

fn ergodic_suite() -> Outcome {
    let t = tol();
    let mut g = rng(9);
    let mut worst = 0.0f64;
    let mut non_closed = 0;
    for k in 0..20 {
        let d = 2 + k % 3;
        let gen = if k % 2 == 0 {
            random_lindblad(&mut g, d, 1 + k % 3)
        } else {
            let split = g.random_range(1..d);
            random_block_lindblad(&mut g, d, split, 1 + k % 2)
        };
        let spec = SemigroupSpec::lindblad(gen);
        let ep = ergodic_projection_continuous(&spec, &t).map_err(|e| format!("generator {k}: {e}"))?;
        let ker = constants_of_motion(&spec, &opts()).map_err(|e| e.to_string())?.subspace;
        worst = worst.max(check_projection(&ep.projection, &ker, &format!("generator {k}"))?);
    }
    for (k, phi) in unital_cp_suite(10, 20).iter().enumerate() {
        let ep = ergodic_projection_discrete(phi, &t).map_err(|e| format!("channel {k}: {e}"))?;
        let fix = fixed_point_space(phi, &t);
        if !fix.is_algebra() {
            non_closed += 1;
        }
        worst = worst.max(check_projection(&ep.projection, &fix, &format!("channel {k}"))?);
    }
    ensure(non_closed > 0, || "no channel with a non-algebraic fixed space was drawn".into())?;
    Ok(format!("40 projections ({non_closed} onto non-algebraic ranges), max residual {worst:.3e}"))
}

/// `UᵀO`, `UᵀO²` and `[diag(O), U]` computed entry by entry.
fn counter3_by_hand(u: &DMatrix<f64>, o: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    let mut uo = vec![0.0; 3];
    let mut uo2 = vec![0.0; 3];
    let mut comm: f64 = 0.0;
    for j in 0..3 {
        for i in 0..3 {
            uo[j] += u[(i, j)] * o[i];
            uo2[j] += u[(i, j)] * o[i] * o[i];
            comm = comm.max((o[i] * u[(i, j)] - u[(i, j)] * o[j]).abs());
        }
    }
    (uo, uo2, comm)
}

fn classical_suite() -> Outcome {
    let mut g = rng(10);
    let o = opts();
    let (mut cons_d, mut cons_c) = (0, 0);
    for k in 0..100 {
        let n = 2 + k % 4;
        let (c, obs) = random_stochastic_case(&mut g, n);
        let v = classical_noether_discrete(&c, &obs, &o).map_err(|e| format!("chain {k}: {e}"))?;
        ensure(v.consistent, || format!("stochastic chain {k}: {:?}", v.inconsistent_groups()))?;
        cons_d += v.holds("U#(O)=O and U#(O^2)=O^2") as usize;
        let (h, obs) = random_rate_case(&mut g, n);
        let v = classical_noether_continuous(&h, &obs, &o).map_err(|e| format!("rate {k}: {e}"))?;
        ensure(v.consistent, || format!("rate matrix {k}: {:?}", v.inconsistent_groups()))?;
        cons_c += v.holds("O and O^2 in ker H#") as usize;
    }
    ensure(cons_d > 0 && cons_d < 100 && cons_c > 0 && cons_c < 100, || format!("degenerate suite {cons_d}/{cons_c}"))?;

    let c = parse_chain(&load_json(&fixture("classical/counter3.json")).unwrap(), "counter3").map_err(|e| e.to_string())?;
    let obs = parse_classical_observable(&load_json(&fixture("classical/counter3_observable.json")).unwrap(), "o").map_err(|e| e.to_string())?;
    let (uo, uo2, comm) = counter3_by_hand(&c.matrix, &obs.values);
    let o2: Vec<f64> = obs.values.iter().map(|x| x * x).collect();
    let first = uo.iter().zip(&obs.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let second = uo2.iter().zip(&o2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(first == 0.0 && second > 0.5 && comm > 0.1, || format!("hand oracle: {first} {second} {comm}"))?;
    let v = classical_noether_discrete(&c, &obs, &o).map_err(|e| e.to_string())?;
    ensure(v.consistent, || "fixture verdict inconsistent".into())?;
    ensure(v.holds("O conserved"), || "O not conserved".into())?;
    ensure(!v.holds("O^2 conserved"), || "O^2 conserved".into())?;
    ensure(!v.holds("[O,U]=0"), || "[O,U]=0 reported".into())?;
    Ok(format!("200 chains consistent ({cons_d}+{cons_c} conserved), fixture pattern reproduced"))
}

fn embedding_naturality() -> Outcome {
    let t = tol();
    let o = opts();
    let mut g: Rng64 = rng(11);
    let mut agreements = 0;
    for k in 0..50 {
        let n = 2 + k % 3;
        let (c, obs) = if k % 2 == 0 { random_stochastic_case(&mut g, n) } else { random_rate_case(&mut g, n) };
        compare_embedding(&c, &obs, &t, &o).map_err(|e| format!("pair {k}: {e}"))?;
        agreements += 6;
    }
    Ok(format!("50 pairs, {agreements} clause agreements"))
}

fn compare_embedding(c: &ClassicalChain, obs: &ObservableVector, t: &Tolerances, o: &AnalysisOptions) -> Result<(), String> {
    let a = obs.to_operator();
    let (cv, qv, pairs) = match embed_diagonal(c, t).map_err(|e| e.to_string())? {
        Embedding::Channel(ch) => (
            classical_noether_discrete(c, obs, o).map_err(|e| e.to_string())?,
            noether_discrete(&ch.to_super(), &a, o).map_err(|e| e.to_string())?,
            DISCRETE_CORRESPONDENCE,
        ),
        Embedding::Semigroup(spec) => (
            classical_noether_continuous(c, obs, o).map_err(|e| e.to_string())?,
            noether_continuous_for(&spec, &a, o)?,
            CONTINUOUS_CORRESPONDENCE,
        ),
    };
    for (cn, qn) in pairs {
        let (x, y) = (cv.clause(cn).ok_or(format!("missing {cn}"))?, qv.clause(qn).ok_or(format!("missing {qn}"))?);
        ensure(x.holds == y.holds, || format!("{cn} = {} but {qn} = {}", x.holds, y.holds))?;
    }
    Ok(())
}

fn noether_continuous_for(spec: &SemigroupSpec, a: &Operator, o: &AnalysisOptions) -> Result<noetherq::NoetherVerdict, String> {
    noetherq::semigroup::noether_continuous(spec, a, o).map_err(|e| e.to_string())
}

fn semigroup_numerics() -> Outcome {
    let t = tol();
    let mut g = rng(12);
    let (mut law, mut tp, mut cp, mut omega) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..20 {
        let d = 2 + k % 3;
        let spec = SemigroupSpec::lindblad(random_lindblad(&mut g, d, 1 + k % 3));
        let (s, u) = (g.random_range(0.0..2.0), g.random_range(0.0..2.0));
        let es = evolve(&spec, s).map_err(|e| e.to_string())?;
        let eu = evolve(&spec, u).map_err(|e| e.to_string())?;
        let esu = evolve(&spec, s + u).map_err(|e| e.to_string())?;
        let res = (es.matrix() * eu.matrix() - esu.matrix()).norm();
        law = law.max(res);
        ensure(res <= 1e-8, || format!("generator {k}: semigroup law residual {res:.3e}"))?;
        for time in [0.1, 1.0, 10.0] {
            let et = evolve(&spec, time).map_err(|e| e.to_string())?;
            tp = tp.max(et.trace_preserving_residual());
            cp = cp.max(-et.choi_min_eigenvalue());
            ensure(tp <= 1e-8 && cp <= 1e-8, || format!("generator {k}, t = {time}: TP {tp:.3e}, Choi {cp:.3e}"))?;
        }
        let w = growth_bound(&spec).map_err(|e| e.to_string())?;
        omega = omega.max(w.abs());
        ensure(w.abs() <= 1e-8, || format!("generator {k}: growth bound {w:.3e}"))?;
        let exact = evolve(&spec, 1.0).map_err(|e| e.to_string())?;
        let errs: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&l| yosida_approx(&spec, 1.0, l, &t).map(|y| (y.matrix() - exact.matrix()).norm()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ensure(errs[0] > errs[1] && errs[1] > errs[2], || format!("generator {k}: Yosida errors {errs:?}"))?;
    }
    Ok(format!("20 generators: law {law:.1e}, TP {tp:.1e}, Choi {cp:.1e}, |omega| {omega:.1e}, Yosida monotone"))
}

fn stinespring_fixtures() -> Outcome {
    let t = tol();
    let (mut dilated, mut skipped, mut worst) = (0, Vec::new(), 0.0f64);
    for path in fixtures_in("channels") {
        let ch = load_channel(&path, &t);
        let name = path.file_stem().unwrap().to_string_lossy().to_string();
        let Some(kraus) = ch.kraus else {
            // mixtures involving the transpose are not CP and have no dilation
            ensure(!ch.superop.cp(&t), || format!("{name}: CP mixture without Kraus form"))?;
            skipped.push(name);
            continue;
        };
        let st = stinespring_dilation(&kraus, &t).map_err(|e| format!("{name}: {e}"))?;
        let err = st.reconstruction_error(&kraus);
        let margin = st.contraction_margin();
        worst = worst.max(err);
        ensure(err <= 1e-9, || format!("{name}: reconstruction error {err:.3e}"))?;
        ensure(margin >= -t.psd_tol, || format!("{name}: I - V*V eigenvalue {margin:.3e}"))?;
        dilated += 1;
    }
    Ok(format!("{dilated} fixtures dilated, max error {worst:.1e}; not CP: {}", skipped.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("schwarz inequality", schwarz_inequality),
        ("multiplicativity propagation", multiplicativity_propagation),
        ("structure identity", structure_identity),
        ("scale collapse", scale_collapse),
        ("M3 counterexample, discrete", m3_discrete),
        ("M3 counterexample, continuous", m3_continuous),
        ("transpose classification", transpose_classification),
        ("measurement compatibility", measurement_compatibility),
        ("ergodic projection", ergodic_suite),
        ("classical suite", classical_suite),
        ("embedding naturality", embedding_naturality),
        ("semigroup numerics", semigroup_numerics),
        ("stinespring", stinespring_fixtures),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
