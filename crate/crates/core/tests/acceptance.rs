//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is printed. Exits 1 if any criterion
//! fails and 4 if a prime-size check fails on valid preconditions.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use nalgebra::DMatrix;
use pisemi::band::enrich;
use pisemi::cli::{emit, parse_checks, parse_input, run_pipeline, Format, Overrides};
use pisemi::families::{
    block_monomial, haar_unitary, planted_ppi, random_partial_isometry, root_of_unity, truncated_shift,
    weyl_heisenberg, zero_unitary_generators, SmallGroup,
};
use pisemi::powerpi::{halmos_wallen, is_power_partial_isometry, ppi_semigroup_check};
use pisemi::structure::{
    approximate_identity_power, atomic_representation, check_automatic_selfadjoint, check_finitely_generated_atomicity,
    check_prime_size, extract_zero_unitary, irreducibility, verify_sandwich,
};
use pisemi::{close, CMatrix, ClosureBudget, Error, Tol, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL_PPI: f64 = 1e-8;
const TOL_HW_PER_DIM: f64 = 1e-9;
const TOL_PROJECTIONS: f64 = 1e-8;
const TOL_ENRICH: f64 = 1e-7;
const TOL_BLOCKS: f64 = 1e-7;
const TOL_ATOMIC_PER_ATOM: f64 = 1e-7;
const POWER_TARGET: f64 = 0.1;
const POWER_ADJOINT_TARGET: f64 = 0.2;
const POWER_N_MAX: u64 = 1_000_000;

type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn tol(eps: f64) -> Tol {
    Tol::new(eps).unwrap()
}

fn ppi_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = tol(TOL_PPI);
    let budget = ClosureBudget::default();
    let mut ppi_agree = 0;
    for _ in 0..500 {
        let p = planted_ppi(10, &mut rng);
        let a = ppi_semigroup_check(&p.matrix, t, budget);
        let b = is_power_partial_isometry(&p.matrix, t);
        if matches!((a, b), (Ok(true), Ok(true))) {
            ppi_agree += 1;
        }
    }
    let mut non_agree = 0;
    let mut drawn = 0;
    while drawn < 500 {
        let n = rng.random_range(2..=10);
        let r = rng.random_range(1..n);
        let m = random_partial_isometry(n, r, &mut rng);
        if svd_is_partial_isometry(&(&m * &m), 1e-6) {
            continue;
        }
        drawn += 1;
        let a = ppi_semigroup_check(&m, t, budget);
        let b = is_power_partial_isometry(&m, t);
        if matches!((a, b), (Ok(false), Ok(false))) {
            non_agree += 1;
        }
    }
    outcome(
        ppi_agree == 500 && non_agree == 500,
        format!("{ppi_agree}/500 PPIs and {non_agree}/500 non-PPIs classified alike by both tests"),
    )
}

fn halmos_wallen_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut exact = 0;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..500 {
        let p = planted_ppi(10, &mut rng);
        let n = p.matrix.rows();
        match halmos_wallen(&p.matrix, Tol::default()) {
            Ok(hw) => {
                let err = hw.reconstruct().distance(&p.matrix);
                worst_ratio = worst_ratio.max(err / (n as f64 * TOL_HW_PER_DIM));
                if hw.unitary_dim == p.unitary_dim
                    && hw.shift_sizes == p.shift_sizes
                    && err <= n as f64 * TOL_HW_PER_DIM
                {
                    exact += 1;
                }
            }
            Err(e) => eprintln!("halmos_wallen failed: {e}"),
        }
    }
    outcome(
        exact == 500,
        format!("{exact}/500 recovered; worst reconstruction error at {worst_ratio:.2e} of the n*1e-9 allowance"),
    )
}

fn projection_laws(zoo: &[ZooEntry]) -> Outcome {
    let mut bad = Vec::new();
    let mut pairs = 0usize;
    for z in zoo {
        let s = &z.semigroup;
        let idem = idempotents(s, 1e-6);
        let herm = idem.iter().all(|e| e.distance(&e.adjoint()) <= TOL_PROJECTIONS);
        let commute = idem
            .iter()
            .all(|e| idem.iter().all(|f| e.commutator_norm(f) <= TOL_PROJECTIONS));
        let mut criterion = true;
        for u in s.elements() {
            let uu = &u.adjoint() * u;
            for v in s.elements() {
                let vv = v * &v.adjoint();
                let lhs = svd_is_partial_isometry(&(u * v), TOL_PROJECTIONS);
                let rhs = uu.commutator_norm(&vv) <= TOL_PROJECTIONS;
                criterion &= lhs == rhs;
                pairs += 1;
            }
        }
        if !(herm && commute && criterion) {
            bad.push(z.name.clone());
        }
    }

    // Off-semigroup pairs exercise both directions of the product criterion.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut yes, mut no, mut disagree) = (0, 0, 0);
    for i in 0..400 {
        let n = rng.random_range(2..=6);
        let w = [
            haar_unitary(n, &mut rng),
            haar_unitary(n, &mut rng),
            haar_unitary(n, &mut rng),
        ];
        let p = diag_projection(n, rng.random_range(1..n), &mut rng);
        let q = diag_projection(n, rng.random_range(1..n), &mut rng);
        let u = &(&w[0] * &p) * &w[1].adjoint();
        let v = if i % 2 == 0 {
            &(&w[1] * &q) * &w[2].adjoint()
        } else {
            &(&w[2] * &q) * &haar_unitary(n, &mut rng).adjoint()
        };
        let lhs = svd_is_partial_isometry(&(&u * &v), TOL_PROJECTIONS);
        let rhs = (&u.adjoint() * &u).commutator_norm(&(&v * &v.adjoint())) <= TOL_PROJECTIONS;
        if lhs != rhs {
            disagree += 1;
        } else if lhs {
            yes += 1;
        } else {
            no += 1;
        }
    }
    outcome(
        zoo.len() >= 50 && bad.is_empty() && disagree == 0 && yes > 0 && no > 0,
        format!(
            "{} zoo instances, {pairs} element pairs, failures {:?}; random pairs {yes} PI/commuting, {no} neither, {disagree} disagreeing",
            zoo.len(),
            bad
        ),
    )
}

fn diag_projection(n: usize, r: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut d = vec![C64::new(0.0, 0.0); n];
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..r {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
        d[idx[i]] = C64::new(1.0, 0.0);
    }
    CMatrix::diag(&d)
}

fn hermitian_projections(s: &pisemi::ClosedSemigroup) -> Vec<CMatrix> {
    dedup(
        idempotents(s, 1e-6).iter().map(CMatrix::hermitian_part).collect(),
        TOL_ENRICH,
    )
}

fn enrichment(zoo: &[ZooEntry]) -> Outcome {
    let mut bad = Vec::new();
    for z in zoo {
        let dim = z.semigroup.dim();
        let e = match enrich(&z.semigroup, Tol::default(), ClosureBudget::default()) {
            Ok(e) => e,
            Err(err) => {
                bad.push(format!("{}: {err}", z.name));
                continue;
            }
        };
        let s1 = &e.semigroup;
        let all_pi = s1.elements().iter().all(|m| svd_is_partial_isometry(m, TOL_ENRICH));
        let atoms0 = joint_atoms(&hermitian_projections(&z.semigroup), dim, 7);
        let proj1 = hermitian_projections(s1);
        let members_match = same_set(&proj1, &subset_sums(&atoms0, dim), TOL_ENRICH);
        let atoms1 = joint_atoms(&proj1, dim, 8);
        let stable = same_set(&atoms0, &atoms1, TOL_ENRICH) && same_set(&atoms0, e.band.atoms(), TOL_ENRICH);
        if !(all_pi && members_match && stable) {
            bad.push(format!(
                "{}: pi {all_pi} members {members_match} stable {stable}",
                z.name
            ));
        }
    }
    outcome(bad.is_empty(), format!("{} instances, failures {:?}", zoo.len(), bad))
}

fn polar_oracle(m: &DMatrix<C64>) -> DMatrix<C64> {
    let svd = m.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

fn zero_unitary_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut passed = 0;
    let mut failures = Vec::new();
    let mut worst_block: f64 = 0.0;
    for i in 0..30 {
        let k = 2 + i % 5;
        let r0 = 1 + i % 3;
        let group = match r0 {
            1 => SmallGroup::Cyclic(rng.random_range(1..=8)),
            2 => [SmallGroup::S3, SmallGroup::D4, SmallGroup::Q8][rng.random_range(0..3)],
            _ => SmallGroup::A4,
        };
        let v = haar_unitary(r0, &mut rng);
        let group_gens: Vec<CMatrix> = group.generators().iter().map(|g| conjugate(g, &v)).collect();
        let w = haar_unitary(k * r0, &mut rng);
        let gens: Vec<CMatrix> = zero_unitary_generators(k, &group_gens)
            .iter()
            .map(|g| conjugate(g, &w))
            .collect();
        let full = close(&gens, Tol::default(), ClosureBudget::default()).unwrap();
        let mut kept = gens.clone();
        kept.extend(
            full.elements()
                .iter()
                .filter(|m| !gens.iter().any(|g| g.distance(m) <= 1e-9) && rng.random_bool(0.5))
                .cloned(),
        );
        let s = close(&kept, Tol::default(), ClosureBudget::default()).unwrap();
        let expected_size = k * k * group.order() + 1;
        let label = format!("k={k} r0={r0} {group:?}");
        if s.len() != expected_size || full.len() != expected_size {
            failures.push(format!("{label}: closure sizes {} and {}", full.len(), s.len()));
            continue;
        }
        let z = match extract_zero_unitary(&s, Tol::default()) {
            Ok(z) => z,
            Err(e) => {
                failures.push(format!("{label}: {e}"));
                continue;
            }
        };
        let sandwich = verify_sandwich(&s, &z, Tol::default()).holds();
        let basis = z.basis.as_dmatrix();
        let mut blocks_ok = true;
        for (a, pattern) in s.elements().iter().zip(&z.patterns) {
            let local = basis.adjoint() * a.as_dmatrix() * basis;
            for ((&j, &i), &g) in pattern
                .permutation
                .domain
                .iter()
                .zip(&pattern.permutation.map)
                .zip(&pattern.labels)
            {
                let block = local.view((i * r0, j * r0), (r0, r0)).into_owned();
                let polar = polar_oracle(&block);
                let d1 = (&block - &polar).norm();
                let d2 = (&polar - z.unitary_group[g].as_dmatrix()).norm();
                worst_block = worst_block.max(d1).max(d2);
                blocks_ok &= d1 <= TOL_BLOCKS && d2 <= TOL_BLOCKS;
            }
        }
        if z.k == k && z.r0 == r0 && z.unitary_group.len() == group.order() && sandwich && blocks_ok {
            passed += 1;
        } else {
            failures.push(format!(
                "{label}: got k={} r0={} |U|={} sandwich {sandwich} blocks {blocks_ok}",
                z.k,
                z.r0,
                z.unitary_group.len()
            ));
        }
    }
    outcome(
        passed == 30,
        format!("{passed}/30 recovered, worst block defect {worst_block:.1e}, failures {failures:?}"),
    )
}

fn atomic(zoo: &[ZooEntry]) -> Outcome {
    let mut irreducible = 0;
    let mut bad = Vec::new();
    for z in zoo {
        let Ok(e) = enrich(&z.semigroup, Tol::default(), ClosureBudget::default()) else {
            bad.push(format!("{}: enrichment failed", z.name));
            continue;
        };
        let s1 = &e.semigroup;
        if !irreducibility(s1, Tol::default()).irreducible {
            continue;
        }
        irreducible += 1;
        let rep = match atomic_representation(s1, &e.band, Tol::default()) {
            Ok(r) => r,
            Err(err) => {
                bad.push(format!("{}: {err}", z.name));
                continue;
            }
        };
        let bases = e.band.atom_bases();
        let k = bases.len();
        let n = s1.dim();
        let mut worst: f64 = 0.0;
        for (idx, a) in s1.elements().iter().enumerate() {
            let el = &rep.per_element[idx];
            let mut sum = DMatrix::<C64>::zeros(n, n);
            for ((&from, &to), t) in el.permutation.domain.iter().zip(&el.permutation.map).zip(&el.unitaries) {
                sum += bases[to].as_dmatrix() * t.as_dmatrix() * bases[from].as_dmatrix().adjoint();
            }
            worst = worst.max((&sum - a.as_dmatrix()).norm());
        }
        let unit_weights = rep.weights.iter().flatten().all(|&w| w == 1.0);
        let ranks: Vec<usize> = joint_atoms(&hermitian_projections(s1), n, 9)
            .iter()
            .map(|p| svd_rank(p, 0.5))
            .collect();
        let equal_ranks = ranks.windows(2).all(|w| w[0] == w[1]);
        if worst > k as f64 * TOL_ATOMIC_PER_ATOM || !unit_weights || !equal_ranks {
            bad.push(format!(
                "{}: error {worst:.1e} weights {unit_weights} ranks {ranks:?}",
                z.name
            ));
        }
    }
    outcome(
        irreducible > 0 && bad.is_empty(),
        format!("{irreducible} irreducible enriched instances, failures {bad:?}"),
    )
}

fn identity_powers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut found = 0;
    let mut verified = 0;
    let mut misses_by_dim = [0usize; 5];
    for i in 0..100 {
        let n = 1 + i % 4;
        let u = haar_unitary(n, &mut rng);
        match approximate_identity_power(&u, POWER_TARGET, POWER_N_MAX) {
            Ok(m) => {
                found += 1;
                let um = u.pow(m as u32);
                let um1 = u.pow(m as u32 - 1);
                if um.distance(&CMatrix::identity(n)) <= POWER_TARGET
                    && um1.distance(&u.adjoint()) <= POWER_ADJOINT_TARGET
                {
                    verified += 1;
                }
            }
            Err(Error::SearchExhausted { .. }) => misses_by_dim[n] += 1,
            Err(e) => eprintln!("unexpected error: {e}"),
        }
    }
    outcome(
        verified == 100,
        format!(
            "{found}/100 found within n_max, {verified} verified; misses by dimension 1..4: {:?}",
            &misses_by_dim[1..]
        ),
    )
}

fn automatic_selfadjoint() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut passed = 0;
    let mut failures = Vec::new();
    for i in 0..20 {
        let k = 3 + i % 4;
        let m = 2 + i % 5;
        let omega = CMatrix::diag(&[root_of_unity(m, 1)]);
        let mut targets: Vec<Option<usize>> = (1..k).map(Some).collect();
        targets.push(None);
        let labels: Vec<CMatrix> = (0..k)
            .map(|_| CMatrix::diag(&[root_of_unity(m, rng.random_range(0..m))]))
            .collect();
        let shift = block_monomial(&targets, &labels);
        let mut gens = zero_unitary_generators(k, &[omega]);
        gens.push(shift.clone());
        let w = haar_unitary(k, &mut rng);
        let gens: Vec<CMatrix> = gens.iter().map(|g| conjugate(g, &w)).collect();
        let s = close(&gens, Tol::default(), ClosureBudget::default()).unwrap();
        let shift_adj = conjugate(&shift, &w).adjoint();
        let selfadjoint = s.elements().iter().any(|e| e.distance(&shift_adj) <= 1e-8);
        let span: Vec<Vec<C64>> = s.elements().iter().map(CMatrix::row_major).collect();
        let stacked = DMatrix::<C64>::from_fn(span.len(), k * k, |r, c| span[r][c]);
        let span_dim = stacked.singular_values().iter().filter(|&&x| x > 1e-8).count();
        let label = format!("k={k} m={m}");
        if selfadjoint || span_dim != k * k {
            failures.push(format!(
                "{label}: bad instance (self-adjoint {selfadjoint}, span {span_dim})"
            ));
            continue;
        }
        match check_automatic_selfadjoint(&s, Tol::default(), ClosureBudget::default()) {
            Ok(true) => passed += 1,
            other => failures.push(format!("{label}: {other:?}")),
        }
    }
    outcome(passed == 20, format!("{passed}/20 confirmed, failures {failures:?}"))
}

fn prime_size(zoo: &[ZooEntry]) -> Outcome {
    let mut wh_pass = 0;
    for n in [2, 3, 5] {
        let (x, z) = weyl_heisenberg(n);
        let s = close(&[x, z], Tol::default(), ClosureBudget::default()).unwrap();
        match check_prime_size(&s, Tol::default()) {
            Ok(true) => wh_pass += 1,
            other => abort_prime_size(&format!("weyl-heisenberg {n}"), &format!("{other:?}")),
        }
    }
    let (mut confirmed, mut skipped) = (0, 0);
    for z in zoo {
        match check_prime_size(&z.semigroup, Tol::default()) {
            Ok(true) => confirmed += 1,
            Err(e @ Error::TheoremViolation { .. }) => abort_prime_size(&z.name, &e.to_string()),
            Ok(false) => abort_prime_size(&z.name, "returned false"),
            Err(_) => skipped += 1,
        }
    }
    outcome(
        wh_pass == 3,
        format!("weyl-heisenberg {wh_pass}/3; zoo {confirmed} confirmed, {skipped} outside the hypotheses"),
    )
}

fn abort_prime_size(name: &str, detail: &str) -> ! {
    println!("criterion 9 FAIL: prime-size violated on {name}: {detail}");
    std::process::exit(4);
}

fn finitely_generated() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut passed = 0;
    let mut failures = Vec::new();
    for i in 0..20 {
        let s = 2 + i % 4;
        let udim = i % 3;
        let m = 2 + i % 4;
        let omega = root_of_unity(m, 1);
        let diag = |rng: &mut ChaCha8Rng| {
            CMatrix::diag(
                &(0..udim)
                    .map(|_| root_of_unity(m, rng.random_range(0..m)))
                    .collect::<Vec<_>>(),
            )
        };
        let with_unitary = |d: CMatrix, shift: CMatrix| if udim == 0 { shift } else { d.direct_sum(&shift) };
        let gens: Vec<CMatrix> = if i % 2 == 0 {
            let base = with_unitary(diag(&mut rng), truncated_shift(s));
            (0..3).map(|p| base.scale(omega.powu(p))).collect()
        } else {
            vec![
                with_unitary(diag(&mut rng), truncated_shift(s)),
                with_unitary(diag(&mut rng), truncated_shift(s).scale(omega)),
            ]
        };
        let w = haar_unitary(gens[0].rows(), &mut rng);
        let gens: Vec<CMatrix> = gens.iter().map(|g| conjugate(g, &w)).collect();
        let label = format!("s={s} unitary={udim} m={m}");
        let report = match check_finitely_generated_atomicity(&gens, Tol::default(), ClosureBudget::default()) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{label}: {e}"));
                continue;
            }
        };
        let n = gens[0].rows();
        let oracle_atoms: Vec<Vec<CMatrix>> = gens
            .iter()
            .map(|g| {
                let sg = pisemi::close_selfadjoint(std::slice::from_ref(g), Tol::default(), ClosureBudget::default())
                    .unwrap();
                joint_atoms(&hermitian_projections(&sg), n, 11)
            })
            .collect();
        let oracle_agree = oracle_atoms.iter().all(|a| same_set(a, &oracle_atoms[0], 1e-7));
        if report.confirmed() && oracle_agree {
            passed += 1;
        } else {
            failures.push(format!("{label}: {report:?}, oracle atoms agree {oracle_agree}"));
        }
    }
    outcome(
        passed == 20,
        format!("{passed}/20 families confirmed, failures {failures:?}"),
    )
}

fn cli_determinism() -> Outcome {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let checks = parse_checks("all").unwrap();
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for name in ["intro_r2_s1", "intro_r3_s2", "basic_matrices", "pauli"] {
        let bytes = std::fs::read(root.join("fixtures").join(format!("{name}.json"))).unwrap();
        let golden = std::fs::read(root.join("golden").join(format!("{name}.json"))).unwrap();
        let run = || {
            let input = parse_input(&bytes).unwrap();
            emit(
                &run_pipeline(&input, &checks, &Overrides::default()).unwrap(),
                Format::Json,
            )
        };
        let (a, b) = (run(), run());
        if a == b && a == golden {
            ok.push(name);
        } else {
            bad.push(format!(
                "{name}: runs identical {}, matches golden {}",
                a == b,
                a == golden
            ));
        }
    }
    outcome(
        bad.is_empty(),
        format!("byte-identical and golden: {ok:?}; failures {bad:?}"),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let zoo = zoo();
    println!("zoo: {} closed self-adjoint partial-isometry semigroups", zoo.len());
    let criteria: Vec<Criterion> = vec![
        (1, "power partial isometry equivalence", Box::new(ppi_equivalence)),
        (2, "halmos-wallen round trip", Box::new(halmos_wallen_round_trip)),
        (3, "projection and product laws", Box::new(|| projection_laws(&zoo))),
        (4, "enrichment", Box::new(|| enrichment(&zoo))),
        (5, "zero-unitary recovery", Box::new(zero_unitary_recovery)),
        (6, "atomic representation", Box::new(|| atomic(&zoo))),
        (7, "approximate identity powers", Box::new(identity_powers)),
        (8, "automatic self-adjointness", Box::new(automatic_selfadjoint)),
        (9, "prime size", Box::new(|| prime_size(&zoo))),
        (10, "finitely generated atomicity", Box::new(finitely_generated)),
        (11, "cli determinism", Box::new(cli_determinism)),
    ];
    let mut failed = Vec::new();
    for (n, name, run) in criteria {
        let t = Instant::now();
        let o = run();
        println!(
            "criterion {n} {}: {name} ({:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed.push(n);
        }
    }
    println!(
        "acceptance: {} failed {:?} in {:.1}s",
        failed.len(),
        failed,
        started.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
