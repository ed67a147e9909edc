//! Runs the selected checks over one generator file.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::band::{enrich, enveloping_band, Enrichment, ProjectionBand};
use crate::closure::{
    close, close_selfadjoint, first_non_partial_isometry, projections_of, ClosedSemigroup, ClosureBudget,
};
use crate::error::Error;
use crate::families::complex_gaussian;
use crate::linalg::{is_partial_isometry, is_unitary, partial_isometry_defects, CMatrix, Tol};
use crate::powerpi::{first_failing_power, halmos_wallen, ppi_semigroup_check};
use crate::structure::{
    approximate_identity_power, atomic_representation, check_automatic_selfadjoint, check_finitely_generated_atomicity,
    check_prime_size, extract_zero_unitary, irreducibility, masa_criterion, orbit_dimension, reducible_split,
    verify_sandwich, IrreducibilityReport, DEFAULT_EPS_TARGET, DEFAULT_N_MAX,
};

use super::input::{effective_tol, ClosureMode, Input};
use super::report::{
    AnalysisReport, AtomicElementReport, AtomicReport, BandSummary, ClosureSummary, EnrichmentSummary,
    GeneratorDecomposition, Settings, SplitClass, Status, Structures, Verdict, ZeroUnitaryReport, SCHEMA,
};
use super::InputError;

/// Every check, in the order the pipeline runs them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    PartialIsometry,
    PowerPartialIsometry,
    HalmosWallen,
    PpiSemigroup,
    IdentityPower,
    Band,
    Enrich,
    Masa,
    Irreducibility,
    ZeroUnitary,
    Atomic,
    ReducibleSplit,
    FgAtomicity,
    PrimeSize,
    AutomaticSa,
}

impl Check {
    pub const ALL: [Check; 15] = [
        Check::PartialIsometry,
        Check::PowerPartialIsometry,
        Check::HalmosWallen,
        Check::PpiSemigroup,
        Check::IdentityPower,
        Check::Band,
        Check::Enrich,
        Check::Masa,
        Check::Irreducibility,
        Check::ZeroUnitary,
        Check::Atomic,
        Check::ReducibleSplit,
        Check::FgAtomicity,
        Check::PrimeSize,
        Check::AutomaticSa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::PartialIsometry => "partial-isometry",
            Check::PowerPartialIsometry => "power-partial-isometry",
            Check::HalmosWallen => "halmos-wallen",
            Check::PpiSemigroup => "ppi-semigroup",
            Check::IdentityPower => "identity-power",
            Check::Band => "band",
            Check::Enrich => "enrich",
            Check::Masa => "masa",
            Check::Irreducibility => "irreducibility",
            Check::ZeroUnitary => "zero-unitary",
            Check::Atomic => "atomic",
            Check::ReducibleSplit => "reducible-split",
            Check::FgAtomicity => "fg-atomicity",
            Check::PrimeSize => "prime-size",
            Check::AutomaticSa => "automatic-sa",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = InputError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| InputError::Validation(format!("--checks: unknown check {s:?}")))
    }
}

/// `all`, an empty string, or a comma-separated list; returned in pipeline order.
pub fn parse_checks(spec: &str) -> Result<Vec<Check>, InputError> {
    let spec = spec.trim();
    if spec == "all" {
        return Ok(Check::ALL.to_vec());
    }
    let mut out = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Check::from_str)
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Command-line settings that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_elements: Option<usize>,
    pub max_word_length: Option<usize>,
    pub seed: u64,
}

/// Facts shared between checks, computed on first use.
struct Context<'a> {
    input: &'a Input,
    tol: Tol,
    budget: ClosureBudget,
    seed: u64,
    s0: ClosedSemigroup,
    /// Failure message and the offending matrix.
    pi: Option<Result<(), (String, CMatrix)>>,
    band: Option<Result<ProjectionBand, Error>>,
    enrichment: Option<Result<Enrichment, Error>>,
    irreducible: Option<Result<IrreducibilityReport, Error>>,
    structures: Structures,
}

type Outcome = (Status, String, Option<bool>, Option<CMatrix>);

fn pass(detail: impl Into<String>) -> Outcome {
    (Status::Pass, detail.into(), None, None)
}

fn skipped(reason: impl Into<String>) -> Outcome {
    (Status::Skipped, reason.into(), None, None)
}

/// Maps an error from the library onto a verdict.
fn from_error(e: &Error) -> Outcome {
    match e {
        Error::TheoremViolation { witness, .. } => {
            (Status::Violation, e.to_string(), None, witness.as_deref().cloned())
        }
        e if e.is_inconclusive() => (Status::Inconclusive, e.to_string(), None, None),
        Error::Precondition(_) | Error::Degenerate | Error::TooManyAtoms { .. } => skipped(e.to_string()),
        _ => (Status::Fail, e.to_string(), None, None),
    }
}

impl<'a> Context<'a> {
    fn closed(&self) -> Result<(), Outcome> {
        if self.s0.is_closed() {
            Ok(())
        } else {
            Err((
                Status::Inconclusive,
                format!("closure budget exhausted at {} elements", self.s0.len()),
                None,
                None,
            ))
        }
    }

    fn partial_isometries(&mut self) -> Result<(), (String, CMatrix)> {
        if let Some(r) = &self.pi {
            return r.clone();
        }
        let mut result = Ok(());
        for (i, g) in self.input.generators.iter().enumerate() {
            if !is_partial_isometry(g, self.tol).unwrap_or(false) {
                let (a, b) = partial_isometry_defects(g);
                result = Err((
                    format!("generators[{i}] is not a partial isometry (defect {:.3e})", a.max(b)),
                    g.clone(),
                ));
                break;
            }
        }
        if result.is_ok() {
            if let Some(i) = first_non_partial_isometry(&self.s0, self.s0.work_tol()) {
                result = Err((
                    format!("element {i} (word {:?}) is not a partial isometry", self.s0.words()[i]),
                    self.s0.elements()[i].clone(),
                ));
            }
        }
        self.pi = Some(result.clone());
        result
    }

    /// Closed and made of partial isometries, or the verdict explaining why not.
    fn pi_semigroup(&mut self) -> Result<(), Outcome> {
        self.closed()?;
        self.partial_isometries()
            .map_err(|(m, _)| skipped(format!("not a semigroup of partial isometries: {m}")))
    }

    fn band(&mut self) -> &Result<ProjectionBand, Error> {
        if self.band.is_none() {
            let t = self.s0.work_tol();
            self.band = Some(enveloping_band(&projections_of(&self.s0, t), self.s0.dim(), t));
        }
        self.band.as_ref().expect("just set")
    }

    fn enrichment(&mut self) -> &Result<Enrichment, Error> {
        if self.enrichment.is_none() {
            self.enrichment = Some(enrich(&self.s0, self.tol, self.budget));
        }
        self.enrichment.as_ref().expect("just set")
    }

    fn irreducibility(&mut self) -> &Result<IrreducibilityReport, Error> {
        if self.irreducible.is_none() {
            let r = if self.s0.is_closed() {
                Ok(irreducibility(&self.s0, self.tol))
            } else {
                Err(Error::BudgetExhausted {
                    partial: Box::new(self.s0.clone()),
                })
            };
            self.irreducible = Some(r);
        }
        self.irreducible.as_ref().expect("just set")
    }

    fn require_irreducible(&mut self) -> Result<(), Outcome> {
        match self.irreducibility() {
            Ok(r) if r.irreducible => Ok(()),
            Ok(_) => Err(skipped("semigroup is reducible")),
            Err(e) => Err(from_error(e)),
        }
    }

    fn run(&mut self, check: Check) -> Outcome {
        let result = match check {
            Check::PartialIsometry => self.check_partial_isometry(),
            Check::PowerPartialIsometry => self.check_ppi(),
            Check::HalmosWallen => self.check_halmos_wallen(),
            Check::PpiSemigroup => self.check_ppi_semigroup(),
            Check::IdentityPower => self.check_identity_power(),
            Check::Band => self.check_band(),
            Check::Enrich => self.check_enrich(),
            Check::Masa => self.check_masa(),
            Check::Irreducibility => self.check_irreducibility(),
            Check::ZeroUnitary => self.check_zero_unitary(),
            Check::Atomic => self.check_atomic(),
            Check::ReducibleSplit => self.check_split(),
            Check::FgAtomicity => self.check_fg_atomicity(),
            Check::PrimeSize => self.check_prime_size(),
            Check::AutomaticSa => self.check_automatic_sa(),
        };
        result.unwrap_or_else(|o| o)
    }

    fn check_partial_isometry(&mut self) -> Result<Outcome, Outcome> {
        if let Err((m, w)) = self.partial_isometries() {
            return Ok((Status::Fail, m, None, Some(w)));
        }
        self.closed()?;
        Ok(pass(format!("all {} elements are partial isometries", self.s0.len())))
    }

    fn check_ppi(&mut self) -> Result<Outcome, Outcome> {
        for (i, g) in self.input.generators.iter().enumerate() {
            if let Some(k) = first_failing_power(g, self.tol).map_err(|e| from_error(&e))? {
                return Ok((
                    Status::Fail,
                    format!("generators[{i}]: power {k} is not a partial isometry"),
                    None,
                    Some(g.clone()),
                ));
            }
        }
        Ok(pass(format!(
            "all {} generators are power partial isometries",
            self.input.generators.len()
        )))
    }

    fn check_halmos_wallen(&mut self) -> Result<Outcome, Outcome> {
        let mut done = Vec::new();
        for (i, g) in self.input.generators.iter().enumerate() {
            match halmos_wallen(g, self.tol) {
                Ok(hw) => {
                    self.structures.halmos_wallen.push(GeneratorDecomposition {
                        generator: i,
                        unitary_dim: hw.unitary_dim,
                        shift_sizes: hw.shift_sizes.clone(),
                        basis: hw.basis.clone(),
                        unitary_block: hw.unitary_block.clone(),
                    });
                    done.push(format!("generators[{i}] = U{} + J{:?}", hw.unitary_dim, hw.shift_sizes));
                }
                Err(Error::NotPowerPartialIsometry { .. }) => {}
                Err(e) => return Err(from_error(&e)),
            }
        }
        if done.is_empty() {
            return Err(skipped("no generator is a power partial isometry"));
        }
        Ok(pass(done.join("; ")))
    }

    fn check_ppi_semigroup(&mut self) -> Result<Outcome, Outcome> {
        let mut parts = Vec::new();
        for (i, g) in self.input.generators.iter().enumerate() {
            let ppi = first_failing_power(g, self.tol).map_err(|e| from_error(&e))?.is_none();
            let closed = ppi_semigroup_check(g, self.tol, self.budget).map_err(|e| from_error(&e))?;
            if ppi != closed {
                return Ok((
                    Status::Violation,
                    format!("generators[{i}]: power test says {ppi}, S(T, T*) test says {closed}"),
                    None,
                    Some(g.clone()),
                ));
            }
            parts.push(format!("generators[{i}]: {ppi}"));
        }
        Ok(pass(format!("power and semigroup tests agree ({})", parts.join(", "))))
    }

    fn check_identity_power(&mut self) -> Result<Outcome, Outcome> {
        let unit_tol = self.tol.scaled(self.s0.dim() as f64);
        let mut parts = Vec::new();
        for (i, g) in self.input.generators.iter().enumerate() {
            if !is_unitary(g, unit_tol) {
                continue;
            }
            let n = approximate_identity_power(g, DEFAULT_EPS_TARGET, DEFAULT_N_MAX).map_err(|e| from_error(&e))?;
            let inverse = g.pow(n as u32 - 1).distance(&g.adjoint());
            parts.push(format!("generators[{i}]: n = {n}, |U^(n-1) - U*| = {inverse:.3e}"));
        }
        if parts.is_empty() {
            return Err(skipped("no unitary generators"));
        }
        Ok(pass(parts.join("; ")))
    }

    fn check_band(&mut self) -> Result<Outcome, Outcome> {
        self.pi_semigroup()?;
        let (summary, detail) = match self.band() {
            Ok(b) => (
                BandSummary {
                    atom_ranks: b.atom_ranks().to_vec(),
                    atoms: b.atoms().to_vec(),
                },
                format!("{} atoms of ranks {:?}", b.atom_count(), b.atom_ranks()),
            ),
            Err(e) => return Err(from_error(e)),
        };
        self.structures.band = Some(summary);
        Ok(pass(detail))
    }

    fn check_enrich(&mut self) -> Result<Outcome, Outcome> {
        self.pi_semigroup()?;
        if !self.s0.is_selfadjoint() {
            return Err(skipped("semigroup is not self-adjoint"));
        }
        match self.enrichment() {
            Ok(en) => {
                let s1 = &en.semigroup;
                let summary = EnrichmentSummary {
                    size: s1.len(),
                    projections: projections_of(s1, s1.work_tol()).len(),
                    max_word_length: s1.max_word_length(),
                };
                let detail = format!(
                    "{} elements, {} projections = all members of a {}-atom band",
                    summary.size,
                    summary.projections,
                    en.band.atom_count()
                );
                self.structures.enrichment = Some(summary);
                Ok(pass(detail))
            }
            Err(e) => Err(from_error(e)),
        }
    }

    fn check_masa(&mut self) -> Result<Outcome, Outcome> {
        self.pi_semigroup()?;
        match self.band() {
            Ok(b) => {
                let masa = masa_criterion(b);
                Ok((
                    Status::Pass,
                    format!(
                        "atom ranks {:?}: {}",
                        b.atom_ranks(),
                        if masa { "masa" } else { "not masa" }
                    ),
                    Some(masa),
                    None,
                ))
            }
            Err(e) => Err(from_error(e)),
        }
    }

    fn check_irreducibility(&mut self) -> Result<Outcome, Outcome> {
        let report = match self.irreducibility() {
            Ok(r) => r.clone(),
            Err(e) => return Err(from_error(e)),
        };
        let n = self.s0.dim();
        self.structures.irreducibility = Some(report.clone());
        if report.irreducible {
            // Sound direction of the orbit test: every vector must generate everything.
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for _ in 0..20 {
                let x = complex_gaussian(n, 1, &mut rng);
                let d = orbit_dimension(&self.s0, &x, self.tol);
                if d < n {
                    return Ok((
                        Status::Violation,
                        format!("span has full dimension but a random orbit spans only {d} of {n}"),
                        Some(true),
                        Some(x),
                    ));
                }
            }
            Ok((
                Status::Pass,
                format!("irreducible: span dimension {} = {n}^2", report.algebra_dim),
                Some(true),
                None,
            ))
        } else {
            let detail = match &report.witness_subspace {
                Some(p) => format!(
                    "reducible: span dimension {} < {}, invariant subspace of dimension {}",
                    report.algebra_dim,
                    n * n,
                    p.trace().re.round()
                ),
                None => format!("reducible: span dimension {} < {}", report.algebra_dim, n * n),
            };
            Ok((Status::Pass, detail, Some(false), report.witness_subspace))
        }
    }

    fn check_zero_unitary(&mut self) -> Result<Outcome, Outcome> {
        self.pi_semigroup()?;
        self.require_irreducible()?;
        let z = extract_zero_unitary(&self.s0, self.tol).map_err(|e| from_error(&e))?;
        let sandwich = verify_sandwich(&self.s0, &z, self.tol);
        let detail = format!("k = {}, r0 = {}, group of order {}", z.k, z.r0, z.unitary_group.len());
        let holds = sandwich.holds();
        self.structures.zero_unitary = Some(ZeroUnitaryReport { structure: z, sandwich });
        if holds {
            Ok(pass(detail))
        } else {
            Ok((
                Status::Violation,
                format!("{detail}: sandwich inclusion fails"),
                None,
                None,
            ))
        }
    }

    fn enriched(&mut self) -> Result<Enrichment, Outcome> {
        self.pi_semigroup()?;
        if !self.s0.is_selfadjoint() {
            return Err(skipped("needs the enrichment of a self-adjoint semigroup"));
        }
        match self.enrichment() {
            Ok(en) => Ok(en.clone()),
            Err(e) => Err(from_error(e)),
        }
    }

    fn check_atomic(&mut self) -> Result<Outcome, Outcome> {
        let en = self.enriched()?;
        self.require_irreducible()?;
        let rep = atomic_representation(&en.semigroup, &en.band, self.tol).map_err(|e| from_error(&e))?;
        let err = rep.max_reconstruction_error(&en.semigroup);
        let bound = en.band.atom_count() as f64 * en.semigroup.work_tol().eps();
        let report = AtomicReport {
            block_dim: rep.block_dim,
            atom_ranks: en.band.atom_ranks().to_vec(),
            elements: rep
                .per_element
                .iter()
                .zip(&rep.weights)
                .map(|(e, w)| AtomicElementReport {
                    permutation: e.permutation.clone(),
                    unitaries: e.unitaries.clone(),
                    weights: w.clone(),
                })
                .collect(),
            max_reconstruction_error: err,
        };
        self.structures.atomic = Some(report);
        let detail = format!(
            "{} atoms of rank {}, reconstruction error {err:.3e}",
            en.band.atom_count(),
            rep.block_dim
        );
        if err <= bound {
            Ok(pass(detail))
        } else {
            Ok((Status::Violation, format!("{detail} exceeds {bound:.3e}"), None, None))
        }
    }

    fn check_split(&mut self) -> Result<Outcome, Outcome> {
        let en = self.enriched()?;
        let parts = reducible_split(&en.semigroup, &en.band, self.tol).map_err(|e| from_error(&e))?;
        let mut classes = Vec::new();
        let ranks = en.band.atom_ranks();
        let mut distinct: Vec<usize> = ranks.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        for ((q, s), &atom_rank) in parts.iter().zip(&distinct) {
            classes.push(SplitClass {
                atom_rank,
                dim: q.trace().re.round() as usize,
                size: s.len(),
            });
        }
        let detail = classes
            .iter()
            .map(|c| format!("rank {} on dimension {}", c.atom_rank, c.dim))
            .collect::<Vec<_>>()
            .join(", ");
        self.structures.reducible_split = classes;
        Ok(pass(format!("{} reducing class(es): {detail}", parts.len())))
    }

    fn check_fg_atomicity(&mut self) -> Result<Outcome, Outcome> {
        if let Err((m, _)) = self.partial_isometries() {
            return Err(skipped(m));
        }
        let r = check_finitely_generated_atomicity(&self.input.generators, self.tol, self.budget)
            .map_err(|e| from_error(&e))?;
        if !r.hypotheses_hold() {
            let mut failed = Vec::new();
            if !r.ranges_equal {
                failed.push("ranges differ");
            }
            if !r.kernels_equal {
                failed.push("kernels differ");
            }
            if !r.commute {
                failed.push("generators do not commute");
            }
            return Err(skipped(format!("hypotheses fail: {}", failed.join(", "))));
        }
        if r.confirmed() {
            Ok(pass(format!(
                "power lattices and band atoms agree (atom ranks {:?})",
                r.atom_ranks
            )))
        } else {
            Ok((
                Status::Violation,
                format!(
                    "hypotheses hold but lattices agree = {:?}, atoms agree = {:?}",
                    r.power_lattices_agree, r.atoms_agree
                ),
                None,
                None,
            ))
        }
    }

    fn check_prime_size(&mut self) -> Result<Outcome, Outcome> {
        self.pi_semigroup()?;
        check_prime_size(&self.s0, self.tol).map_err(|e| from_error(&e))?;
        Ok(pass(
            "irreducible without rank-one members in prime dimension: a unitary group",
        ))
    }

    fn check_automatic_sa(&mut self) -> Result<Outcome, Outcome> {
        self.pi_semigroup()?;
        if check_automatic_selfadjoint(&self.s0, self.tol, self.budget).map_err(|e| from_error(&e))? {
            Ok(pass("the self-adjoint closure consists of partial isometries"))
        } else {
            Ok((
                Status::Violation,
                "the self-adjoint closure contains a non-partial-isometry".into(),
                None,
                None,
            ))
        }
    }
}

/// Closes the generators and runs `checks` in pipeline order.
pub fn run_pipeline(input: &Input, checks: &[Check], overrides: &Overrides) -> Result<AnalysisReport, InputError> {
    let tol = effective_tol(&input.file, overrides.tol)?;
    let file_budget = input.file.budget();
    let budget = ClosureBudget::new(
        overrides.max_elements.unwrap_or(file_budget.max_elements),
        overrides.max_word_length.unwrap_or(file_budget.max_word_length),
    )
    .map_err(|e| InputError::Validation(e.to_string()))?;
    let s0 = match input.file.closure {
        ClosureMode::Plain => close(&input.generators, tol, budget),
        ClosureMode::SelfAdjoint => close_selfadjoint(&input.generators, tol, budget),
    }
    .map_err(|e| InputError::Validation(e.to_string()))?;

    let mut ordered = checks.to_vec();
    ordered.sort_unstable();
    ordered.dedup();

    let closure = ClosureSummary {
        generators: input.generators.len(),
        size: s0.len(),
        status: s0.status(),
        max_word_length: s0.max_word_length(),
        work_tol: s0.work_tol().eps(),
        selfadjoint: s0.is_closed() && s0.is_selfadjoint(),
    };
    let mut ctx = Context {
        input,
        tol,
        budget,
        seed: overrides.seed,
        s0,
        pi: None,
        band: None,
        enrichment: None,
        irreducible: None,
        structures: Structures::default(),
    };
    let verdicts = ordered
        .iter()
        .map(|&c| {
            let (status, detail, value, witness) = ctx.run(c);
            Verdict {
                check: c.name().to_string(),
                status,
                detail,
                value,
                witness,
            }
        })
        .collect();
    Ok(AnalysisReport {
        schema: SCHEMA.to_string(),
        name: input.file.name.clone(),
        input_digest: input.digest.clone(),
        settings: Settings {
            tol: tol.eps(),
            max_elements: budget.max_elements,
            max_word_length: budget.max_word_length,
            closure: input.file.closure,
            checks: ordered.iter().map(|c| c.name().to_string()).collect(),
            seed: overrides.seed,
        },
        closure,
        verdicts,
        structures: ctx.structures,
    })
}
