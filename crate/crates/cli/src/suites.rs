//! Verification suites. Each check counts the cases it examined and the
//! violations it found; checks that only make sense for a simple algebra are
//! marked skipped, with the diagnostic in the note, when the algebra is
//! degenerate.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use log::info;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sho_core::bider::{solve_flat, ConstraintForm, SolveMode, Verification, FLAT_LIMIT};
use sho_core::cartan::{derivation_kernel, AlgebraChain};
use sho_core::linalg::echelonize;
use sho_core::structure::{centralizer, degree_coordinates, monomial_weight, toral_basis, weight_decompose};
use sho_core::witt::DivergenceConvention;
use sho_core::{AlgebraContext, FieldElem, MonoId, Monomial, Parity, SuperPoly, VectorField};

use crate::error::CliResult;
use crate::session::Session;

/// Pairs of Λ or W basis elements are all checked up to this many.
const EXHAUSTIVE_PAIRS: usize = 250_000;
/// Triples of Λ basis elements are all checked up to this many.
const EXHAUSTIVE_TRIPLES: usize = 50_000;
/// W basis pairs for the bracket and divergence checks before sampling.
const EXHAUSTIVE_W_PAIRS: usize = 50_000;
/// Monomial pairs for the Hamiltonian homomorphism before sampling.
const EXHAUSTIVE_HAMILTONIAN_PAIRS: usize = 4_096;
const SAMPLED_PAIRS: usize = 20_000;
const SAMPLED_TRIPLES: usize = 10_000;
const HAMILTONIAN_SAMPLES: usize = 2_000;
const JACOBI_SAMPLES: usize = 1_000;
const TENSOR_JACOBI_EXHAUSTIVE_DIM: usize = 40;
const TENSOR_JACOBI_SAMPLES: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Weights,
    Lemmas,
    Theorem,
    All,
}

impl Suite {
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Identities, Suite::Weights, Suite::Lemmas, Suite::Theorem],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Identities => "identities",
            Suite::Weights => "weights",
            Suite::Lemmas => "lemmas",
            Suite::Theorem => "theorem",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "identities" => Ok(Suite::Identities),
            "weights" => Ok(Suite::Weights),
            "lemmas" => Ok(Suite::Lemmas),
            "theorem" => Ok(Suite::Theorem),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite '{other}' (expected identities, weights, lemmas, theorem or all)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn new(suite: Suite, name: &str, checked: usize, violations: usize) -> Self {
        CheckResult {
            suite,
            name: name.to_string(),
            checked: checked as u64,
            violations: violations as u64,
            status: if violations == 0 { Status::Pass } else { Status::Fail },
            note: None,
        }
    }

    fn skipped(suite: Suite, name: &str, note: String) -> Self {
        CheckResult {
            suite,
            name: name.to_string(),
            checked: 0,
            violations: 0,
            status: Status::Skipped,
            note: Some(note),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Weight of one `T_H` image, measured by bracketing with the torals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub monomial: String,
    pub key: u64,
    pub measured: Vec<i64>,
    pub closed_form: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSpace {
    pub weight: Vec<i64>,
    pub ho_dim: usize,
}

/// A named element whose weight on `h_i` has a known value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedWeight {
    pub element: String,
    pub toral: usize,
    pub expected: i64,
    pub measured: Option<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightTable {
    pub entries: Vec<WeightEntry>,
    pub ho_spaces: Vec<WeightSpace>,
    pub named: Vec<NamedWeight>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremSummary {
    pub mode: SolveMode,
    pub even_dim: usize,
    pub odd_dim: usize,
    pub lambdas: Vec<Option<FieldElem>>,
}

/// Everything the suites produce besides the checks themselves.
#[derive(Default)]
pub struct SuiteOutput {
    pub checks: Vec<CheckResult>,
    pub weights: Option<WeightTable>,
    pub theorem: Option<TheoremSummary>,
}

/// Independent stream per check, so adding a check leaves the others' samples alone.
fn rng_for(seed: u64, check: &str) -> ChaCha8Rng {
    let salt = check.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

/// All index pairs below `n`, or a seeded sample of them.
fn pairs(n: usize, limit: usize, samples: usize, rng: &mut impl Rng) -> (Vec<(usize, usize)>, bool) {
    if n * n <= limit {
        ((0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect(), true)
    } else {
        (
            (0..samples)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect(),
            false,
        )
    }
}

fn coverage(exhaustive: bool) -> &'static str {
    if exhaustive {
        "exhaustive"
    } else {
        "sampled"
    }
}

fn sign(ctx: &AlgebraContext, x: Parity, y: Parity) -> FieldElem {
    ctx.field().sign(x.sign_odd(y))
}

fn w_basis(ctx: &AlgebraContext) -> Vec<VectorField> {
    (0..ctx.w_dim() as u32)
        .map(|c| {
            let (m, j) = ctx.w_split(c);
            VectorField::basis(ctx, m, j, FieldElem::ONE)
        })
        .collect()
}

pub fn run(session: &mut Session, suite: Suite, mode: SolveMode) -> CliResult<SuiteOutput> {
    let mut out = SuiteOutput::default();
    for s in suite.expand() {
        info!("running the {s} suite");
        match s {
            Suite::Identities => out.checks.extend(identities(session)?),
            Suite::Weights => {
                let (checks, table) = weights(session)?;
                out.checks.extend(checks);
                out.weights = Some(table);
            }
            Suite::Lemmas => out.checks.extend(lemmas(session)?),
            Suite::Theorem => {
                let (checks, summary) = theorem(session, mode)?;
                out.checks.extend(checks);
                out.theorem = summary;
            }
            Suite::All => unreachable!("expanded above"),
        }
    }
    Ok(out)
}

fn identities(session: &mut Session) -> CliResult<Vec<CheckResult>> {
    let seed = session.seed();
    let ctx = session.ctx().clone();
    let ids: Vec<MonoId> = ctx.ids().collect();
    let dim = ids.len();
    let fld = *ctx.field();
    let mut checks = Vec::new();
    let s = Suite::Identities;

    let (ps, full) = pairs(
        dim,
        EXHAUSTIVE_PAIRS,
        SAMPLED_PAIRS,
        &mut rng_for(seed, "supercommutativity"),
    );
    let bad = ps
        .par_iter()
        .filter(|&&(a, b)| {
            let (a, b) = (ids[a], ids[b]);
            let ab = ctx.mul_ids(a, b);
            let ba = ctx
                .mul_ids(b, a)
                .map(|(c, m)| (fld.mul(c, sign(&ctx, ctx.parity_of(a), ctx.parity_of(b))), m));
            ab != ba
        })
        .count();
    checks.push(CheckResult::new(s, "supercommutativity", ps.len(), bad).with_note(coverage(full)));

    let mono = |m: MonoId| SuperPoly::monomial(&ctx, m, FieldElem::ONE);
    let (triples, full) = if dim.pow(3) <= EXHAUSTIVE_TRIPLES {
        let all = (0..dim)
            .flat_map(|a| (0..dim).flat_map(move |b| (0..dim).map(move |c| [a, b, c])))
            .collect::<Vec<_>>();
        (all, true)
    } else {
        let mut rng = rng_for(seed, "associativity");
        let sample = (0..SAMPLED_TRIPLES)
            .map(|_| std::array::from_fn(|_| rng.gen_range(0..dim)))
            .collect();
        (sample, false)
    };
    let bad = triples
        .par_iter()
        .map(|&[a, b, c]| -> CliResult<bool> {
            let (f, g, h) = (mono(ids[a]), mono(ids[b]), mono(ids[c]));
            let left = ctx.mul(&ctx.mul(&f, &g)?, &h)?;
            let right = ctx.mul(&f, &ctx.mul(&g, &h)?)?;
            Ok(left != right)
        })
        .collect::<CliResult<Vec<bool>>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    checks.push(CheckResult::new(s, "associativity", triples.len(), bad).with_note(coverage(full)));

    let dirs = ctx.directions();
    let (ps, full) = pairs(
        dim,
        EXHAUSTIVE_PAIRS / dirs,
        SAMPLED_PAIRS / dirs,
        &mut rng_for(seed, "leibniz"),
    );
    let bad = ps
        .par_iter()
        .map(|&(a, b)| -> CliResult<usize> {
            let (f, g) = (mono(ids[a]), mono(ids[b]));
            let fg = ctx.mul(&f, &g)?;
            let mut bad = 0;
            for i in 1..=dirs {
                let lhs = ctx.derive(i, &fg)?;
                let t1 = ctx.mul(&ctx.derive(i, &f)?, &g)?;
                let t2 = ctx
                    .mul(&f, &ctx.derive(i, &g)?)?
                    .scale(&fld, sign(&ctx, ctx.tau(i), ctx.parity_of(ids[a])));
                if lhs != t1.add(&ctx, &t2)? {
                    bad += 1;
                }
            }
            Ok(bad)
        })
        .collect::<CliResult<Vec<usize>>>()?
        .into_iter()
        .sum();
    checks.push(CheckResult::new(s, "derivation_leibniz_rule", ps.len() * dirs, bad).with_note(coverage(full)));

    let basis = w_basis(&ctx);
    let wd = basis.len();
    let (ps, full) = pairs(
        wd,
        EXHAUSTIVE_W_PAIRS,
        SAMPLED_PAIRS,
        &mut rng_for(seed, "bracket_skew"),
    );
    let bad = ps
        .par_iter()
        .map(|&(a, b)| -> CliResult<bool> {
            let (x, y) = (&basis[a], &basis[b]);
            let (px, py) = (ctx.w_parity(a as u32), ctx.w_parity(b as u32));
            let xy = ctx.bracket(x, y)?;
            let yx = ctx.bracket(y, x)?.scale(&fld, fld.neg(sign(&ctx, px, py)));
            Ok(xy != yx)
        })
        .collect::<CliResult<Vec<bool>>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    checks.push(CheckResult::new(s, "bracket_super_skew_symmetry", ps.len(), bad).with_note(coverage(full)));

    let by_parity: [Vec<usize>; 2] =
        [Parity::Even, Parity::Odd].map(|q| (0..wd).filter(|&c| ctx.w_parity(c as u32) == q).collect());
    let mut rng = rng_for(seed, "jacobi");
    let homogeneous = |rng: &mut ChaCha8Rng| -> CliResult<(VectorField, Parity)> {
        let q = if rng.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let pool = &by_parity[q.bit() as usize];
        let mut v = VectorField::zero(&ctx);
        for _ in 0..rng.gen_range(1..=3) {
            let c = *pool.choose(rng).expect("both parities occur in W");
            v = v.add(&ctx, &basis[c].scale(&fld, fld.elem(rng.gen_range(1..fld.p()) as i64)))?;
        }
        Ok((v, q))
    };
    let triples: Vec<[(VectorField, Parity); 3]> = (0..JACOBI_SAMPLES)
        .map(|_| Ok([homogeneous(&mut rng)?, homogeneous(&mut rng)?, homogeneous(&mut rng)?]))
        .collect::<CliResult<_>>()?;
    let bad = triples
        .par_iter()
        .map(|[(a, pa), (b, pb), (c, _)]| -> CliResult<bool> {
            let lhs = ctx.bracket(a, &ctx.bracket(b, c)?)?;
            let r1 = ctx.bracket(&ctx.bracket(a, b)?, c)?;
            let r2 = ctx.bracket(b, &ctx.bracket(a, c)?)?.scale(&fld, sign(&ctx, *pa, *pb));
            Ok(lhs != r1.add(&ctx, &r2)?)
        })
        .collect::<CliResult<Vec<bool>>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    checks.push(CheckResult::new(s, "graded_jacobi", JACOBI_SAMPLES, bad).with_note("random homogeneous triples"));

    let (ps, full) = pairs(
        dim,
        EXHAUSTIVE_HAMILTONIAN_PAIRS,
        HAMILTONIAN_SAMPLES,
        &mut rng_for(seed, "hamiltonian"),
    );
    let bad = ps
        .par_iter()
        .map(|&(a, b)| -> CliResult<bool> {
            let tf = ctx.t_h_monomial(ids[a]);
            let g = mono(ids[b]);
            Ok(ctx.bracket(&tf, &ctx.t_h(&g))? != ctx.t_h(&ctx.apply(&tf, &g)?))
        })
        .collect::<CliResult<Vec<bool>>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    checks.push(CheckResult::new(s, "hamiltonian_homomorphism", ps.len(), bad).with_note(coverage(full)));

    let (ps, full) = pairs(wd, EXHAUSTIVE_W_PAIRS, SAMPLED_PAIRS, &mut rng_for(seed, "divergence"));
    let mut defects = Vec::new();
    for conv in DivergenceConvention::ALL {
        let bad = ps
            .par_iter()
            .map(|&(a, b)| Ok(!ctx.divergence_defect(conv, &basis[a], &basis[b])?.is_zero()))
            .collect::<CliResult<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count();
        defects.push((conv, bad));
    }
    let holding: Vec<_> = defects.iter().filter(|(_, bad)| *bad == 0).map(|(c, _)| *c).collect();
    let name = |c: DivergenceConvention| match c {
        DivergenceConvention::SkewAction => "skew action [g,E] = -(-1)^{d(g)d(E)} E(g)",
        DivergenceConvention::SymmetricAction => "symmetric action [g,E] = (-1)^{d(g)d(E)} E(g)",
    };
    let note = match holding.as_slice() {
        [c] => format!("{}; holds under the {}", coverage(full), name(*c)),
        [] => format!("{}; fails under both conventions", coverage(full)),
        _ => format!("{}; holds under both conventions", coverage(full)),
    };
    let violations = if holding == [DivergenceConvention::SkewAction] {
        0
    } else {
        defects[0].1.max(1)
    };
    checks.push(CheckResult::new(s, "divergence_identity_convention", ps.len() * 2, violations).with_note(note));

    let chain = session.chain()?;
    let p = ctx.p() as usize;
    let expected = p.pow(ctx.t().iter().sum()) * (1 << ctx.n()) - 1;
    let ho = chain.ho.rank();
    let kernel = derivation_kernel(&ctx)?.rank();
    let oracle = dim - kernel;
    let bad = usize::from(ho != expected) + usize::from(oracle != ho);
    checks.push(CheckResult::new(s, "ho_dimension", 2, bad).with_note(format!(
        "formula {expected}, spanned {ho}, dim Λ minus derivation kernel {dim} - {kernel} = {oracle}"
    )));

    checks.push(chain_soundness(&ctx, chain)?);

    let tensor = session.tensor();
    let d = tensor.dim();
    checks.push(CheckResult::new(
        s,
        "structure_skew_symmetry",
        d * d,
        tensor.skew_violations(),
    ));
    let (checked, bad, note) = if d <= TENSOR_JACOBI_EXHAUSTIVE_DIM {
        (d.pow(3), tensor.jacobi_violations_exhaustive(), "exhaustive")
    } else {
        let mut rng = rng_for(seed, "structure_jacobi");
        (
            TENSOR_JACOBI_SAMPLES,
            tensor.jacobi_violations_sampled(&mut rng, TENSOR_JACOBI_SAMPLES),
            "sampled",
        )
    };
    checks.push(CheckResult::new(s, "structure_jacobi", checked, bad).with_note(note));

    checks.extend(simplicity_checks(session)?);
    Ok(checks)
}

fn chain_soundness(ctx: &AlgebraContext, chain: &AlgebraChain) -> CliResult<CheckResult> {
    let mut bad = 0;
    let mut checked = 0;
    let mut failed = Vec::new();
    let mut expect = |ok: bool, what: &str| {
        checked += 1;
        if !ok {
            bad += 1;
            failed.push(what.to_string());
        }
    };
    expect(chain.sho.is_subspace_of(&chain.sho_bar)?, "SHO in SHO-bar");
    expect(chain.sho_bar.is_subspace_of(&chain.sho_prime)?, "SHO-bar in SHO'");
    let meet = chain.sprime.intersection(&chain.ho)?;
    expect(
        chain.sho_prime.is_subspace_of(&meet)? && meet.rank() == chain.sho_prime.rank(),
        "SHO' = S' meet HO",
    );
    let div_bad = chain
        .basis_vf()
        .par_iter()
        .map(|v| Ok(!ctx.divergence(v)?.is_zero()))
        .collect::<CliResult<Vec<bool>>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    checked += chain.basis_vf().len();
    bad += div_bad;
    if div_bad > 0 {
        failed.push(format!("{div_bad} SHO basis vectors with nonzero divergence"));
    }
    let check = CheckResult::new(Suite::Identities, "chain_soundness", checked, bad);
    Ok(if failed.is_empty() {
        check.with_note("inclusions and zero divergence hold")
    } else {
        check.with_note(failed.join("; "))
    })
}

fn degenerate_note(session: &Session) -> String {
    let sim = session.simplicity();
    if sim.dim == 0 {
        return "degenerate: SHO is zero".to_string();
    }
    let mut why = Vec::new();
    if !sim.basis_ideals_whole {
        why.push("a basis vector generates a proper ideal");
    }
    if !sim.centerless {
        why.push("nonzero center");
    }
    if !sim.perfect {
        why.push("[SHO,SHO] is proper");
    }
    format!("degenerate: {}", why.join(", "))
}

fn simplicity_checks(session: &Session) -> CliResult<Vec<CheckResult>> {
    let s = Suite::Identities;
    let names = ["simple", "perfect", "centerless", "degree_minus_one_self_centralizing"];
    if session.degenerate() {
        let note = degenerate_note(session);
        return Ok(names.iter().map(|n| CheckResult::skipped(s, n, note.clone())).collect());
    }
    let sim = session.simplicity();
    let tensor = session.tensor();
    let d = tensor.dim();
    let low = degree_coordinates(tensor, -1);
    let cent = centralizer(tensor, &low)?;
    let equal = cent.rank() == low.rank() && low.is_subspace_of(&cent)?;
    Ok(vec![
        CheckResult::new(s, names[0], d, usize::from(!sim.basis_ideals_whole))
            .with_note("every basis vector generates the whole algebra"),
        CheckResult::new(s, names[1], d, usize::from(!sim.perfect)),
        CheckResult::new(s, names[2], d, usize::from(!sim.centerless)),
        CheckResult::new(s, names[3], low.rank(), usize::from(!equal)).with_note(format!(
            "degree -1 part of dimension {}, centralizer {}",
            low.rank(),
            cent.rank()
        )),
    ])
}

/// `Some(c)` when `[h, v] = c v`.
fn eigenvalue(ctx: &AlgebraContext, h: &VectorField, v: &VectorField) -> CliResult<Option<FieldElem>> {
    let image = ctx.bracket(h, v)?;
    let Some((coord, lead)) = v.terms().next() else {
        return Ok(None);
    };
    let fld = ctx.field();
    let c = fld.mul(image.coeff(coord), fld.inv(lead)?);
    Ok((image == v.scale(fld, c)).then_some(c))
}

fn centered(ctx: &AlgebraContext, w: &[FieldElem]) -> Vec<i64> {
    w.iter().map(|&c| ctx.field().centered(c)).collect()
}

fn weights(session: &mut Session) -> CliResult<(Vec<CheckResult>, WeightTable)> {
    let s = Suite::Weights;
    let ctx = session.ctx().clone();
    let n = ctx.n();
    let fld = *ctx.field();
    let torals = toral_basis(&ctx);
    let mut checks = Vec::new();

    let mut checked = 0;
    let mut bad = 0;
    for a in &torals {
        for b in &torals {
            checked += 1;
            if !ctx.bracket(a, b)?.is_zero() {
                bad += 1;
            }
        }
    }
    let in_sho = session.tensor().torals().len() == torals.len();
    checks.push(
        CheckResult::new(s, "torals_commute", checked, bad).with_note(if in_sho {
            "torals lie in SHO"
        } else {
            "torals lie outside SHO"
        }),
    );

    let measured: Vec<(MonoId, Option<Vec<FieldElem>>)> = ctx
        .ids()
        .collect::<Vec<_>>()
        .par_iter()
        .filter_map(|&m| {
            let v = ctx.t_h_monomial(m);
            if v.is_zero() {
                return None;
            }
            let w = torals
                .iter()
                .map(|h| eigenvalue(&ctx, h, &v))
                .collect::<CliResult<Option<Vec<_>>>>();
            Some(w.map(|w| (m, w)))
        })
        .collect::<CliResult<_>>()?;
    let mut table = WeightTable::default();
    let mut bad = 0;
    for (m, w) in &measured {
        let closed = monomial_weight(&ctx, *m).0;
        if w.as_ref() != Some(&closed) {
            bad += 1;
        }
        table.entries.push(WeightEntry {
            monomial: ctx.render_monomial(*m),
            key: ctx.key(*m),
            measured: w.as_deref().map(|w| centered(&ctx, w)).unwrap_or_default(),
            closed_form: centered(&ctx, &closed),
        });
    }
    checks.push(CheckResult::new(
        s,
        "hamiltonian_weights_match_closed_form",
        measured.len(),
        bad,
    ));

    let chain = session.chain()?;
    let spaces = weight_decompose(&ctx, &chain.ho, &torals)?;
    let total: usize = spaces.values().map(|v| v.rank()).sum();
    let union = echelonize(fld, ctx.w_dim(), spaces.values().flat_map(|v| v.basis().iter()))?;
    let direct = total == chain.ho.rank() && union.rank() == total && union.is_subspace_of(&chain.ho)?;
    table.ho_spaces = spaces
        .iter()
        .map(|(w, v)| WeightSpace {
            weight: centered(&ctx, &w.0),
            ho_dim: v.rank(),
        })
        .collect();
    checks.push(
        CheckResult::new(s, "ho_weight_space_decomposition", spaces.len(), usize::from(!direct)).with_note(format!(
            "{} weight spaces of total dimension {total}, HO dimension {}",
            spaces.len(),
            chain.ho.rank()
        )),
    );

    let mono = |alpha_at: Option<usize>, odd: Option<usize>| -> CliResult<MonoId> {
        let mut alpha = vec![0; n];
        if let Some(i) = alpha_at {
            alpha[i - 1] = 1;
        }
        let odd: Vec<usize> = odd.into_iter().collect();
        Ok(ctx.id_of(&Monomial::new(alpha, &odd)?)?)
    };
    let mut bad = 0;
    for i in 1..n {
        let j = i + 1;
        let cases = [
            (format!("T_H(x{})", i + n), mono(None, Some(i + n))?, 1),
            (format!("T_H(x{i})"), mono(Some(i), None)?, -1),
            (format!("T_H(x{i}x{})", j + n), mono(Some(i), Some(j + n))?, -2),
        ];
        for (element, m, expected) in cases {
            let got = eigenvalue(&ctx, &torals[i - 1], &ctx.t_h_monomial(m))?;
            if got != Some(fld.elem(expected)) {
                bad += 1;
            }
            table.named.push(NamedWeight {
                element,
                toral: i,
                expected,
                measured: got.map(|c| fld.centered(c)),
            });
        }
    }
    checks.push(
        CheckResult::new(s, "named_weights", table.named.len(), bad)
            .with_note("+1 on T_H(x_i'), -1 on T_H(x_i), -2 on T_H(x_i x_j') for h_i, j = i+1"),
    );
    Ok((checks, table))
}

fn lemmas(session: &mut Session) -> CliResult<Vec<CheckResult>> {
    let s = Suite::Lemmas;
    let names = [
        "dense_blocked_agree",
        "full_stream",
        "right_derivation_law",
        "four_term_identity",
        "self_bracket_vanishes",
        "commuting_pairs_annihilated",
        "toral_weight_preserved",
        "flat_cross_assembly",
    ];
    if session.degenerate() {
        let note = degenerate_note(session);
        return Ok(names.iter().map(|n| CheckResult::skipped(s, n, note.clone())).collect());
    }
    let mut agree_bad = 0;
    let mut full = (0, 0);
    let mut totals: HashMap<&str, (usize, usize)> = HashMap::new();
    let mut sampled = false;
    for parity in [Parity::Even, Parity::Odd] {
        let dense = session.solve(parity, SolveMode::Dense)?.0.clone();
        let blocked = session.solve(parity, SolveMode::Blocked)?.0.clone();
        if dense != blocked {
            agree_bad += 1;
        }
        for mode in [SolveMode::Dense, SolveMode::Blocked] {
            let report = &session.solve(parity, mode)?.1;
            for c in &report.full_checks {
                full.0 += 1;
                full.1 += usize::from(!c.passed());
            }
            if report.verification == Verification::Unverified {
                full.1 += 1;
            }
            for l in &report.lemmas {
                sampled |= !l.exhaustive;
                let mut add = |name, checked, bad| {
                    let e = totals.entry(name).or_insert((0, 0));
                    e.0 += checked;
                    e.1 += bad;
                };
                add(names[2], l.right_law_checked, l.right_law_violations);
                add(names[3], l.four_term_checked, l.four_term_violations);
                add(names[4], l.self_bracket_checked, l.self_bracket_violations);
                add(names[5], l.commuting_checked, l.commuting_violations);
                add(names[6], l.toral_weight_checked, l.toral_weight_violations);
            }
        }
    }
    let mut checks = vec![
        CheckResult::new(s, names[0], 2, agree_bad).with_note("solution bases of both parities"),
        CheckResult::new(s, names[1], full.0, full.1).with_note("every solution against every constraint row"),
    ];
    let coverage = if sampled { "tuples sampled" } else { "tuples exhaustive" };
    for name in &names[2..7] {
        let (checked, bad) = totals.get(name).copied().unwrap_or((0, 0));
        checks.push(CheckResult::new(s, name, checked, bad).with_note(coverage));
    }

    let tensor = session.tensor();
    let d = tensor.dim();
    if d.pow(3) > FLAT_LIMIT {
        checks.push(CheckResult::skipped(
            s,
            names[7],
            format!("{} unknowns exceed the single-system limit of {FLAT_LIMIT}", d.pow(3)),
        ));
    } else {
        let mut bad = 0;
        for parity in [Parity::Even, Parity::Odd] {
            let tensor = session.tensor().clone();
            let (left, _) = solve_flat(&tensor, parity, ConstraintForm::LeftLaw)?;
            let (right, _) = solve_flat(&tensor, parity, ConstraintForm::RightLaw)?;
            let dense = &session.solve(parity, SolveMode::Dense)?.0;
            bad += usize::from(&left != dense) + usize::from(left.len() != right.len());
        }
        checks.push(CheckResult::new(s, names[7], 4, bad).with_note("single-system solves from either derivation law"));
    }
    Ok(checks)
}

fn theorem(session: &mut Session, mode: SolveMode) -> CliResult<(Vec<CheckResult>, Option<TheoremSummary>)> {
    let s = Suite::Theorem;
    let names = [
        "even_solution_dimension",
        "even_solutions_inner",
        "odd_solution_dimension",
    ];
    if session.degenerate() {
        let note = degenerate_note(session);
        return Ok((
            names.iter().map(|n| CheckResult::skipped(s, n, note.clone())).collect(),
            None,
        ));
    }
    let even = session.solve(Parity::Even, mode)?.1.clone();
    let odd = session.solve(Parity::Odd, mode)?.1.clone();
    let inner_bad = even.lambdas.iter().filter(|l| l.is_none()).count();
    let checks = vec![
        CheckResult::new(s, names[0], 1, usize::from(even.nullspace_dim != 1))
            .with_note(format!("dimension {}", even.nullspace_dim)),
        CheckResult::new(s, names[1], even.lambdas.len(), inner_bad),
        CheckResult::new(s, names[2], 1, usize::from(odd.nullspace_dim != 0))
            .with_note(format!("dimension {}", odd.nullspace_dim)),
    ];
    let summary = TheoremSummary {
        mode: even.mode,
        even_dim: even.nullspace_dim,
        odd_dim: odd.nullspace_dim,
        lambdas: even.lambdas.clone(),
    };
    Ok((checks, Some(summary)))
}
