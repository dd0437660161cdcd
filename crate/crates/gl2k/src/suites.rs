//! Verification suites shared by the command-line front end and the acceptance tests.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::{fundamental_part, is_prime_u64, kronecker_i128};
use crate::config::{OrbitalSpec, RunConfig, TableSpec};
use crate::elliptic::{DiscriminantData, EllipticDatum};
use crate::error::{Error, Result};
use crate::field::{AlgInt, FieldDescriptor, Ideal, PrimeIdeal, SplitType};
use crate::kloosterman::{
    classify, closed_value, global_dirichlet, local_constant, local_dirichlet_auto, local_dirichlet_closed, local_profile, Regime,
};
use crate::lfun::{afe_verify, finite_part, finite_part_by_characters, verify_functional_equation, AfeBudget};
use crate::report::{json_f64, Check, VerificationReport};
use crate::symbols::{chi_d, modified_hilbert};

/// A prime ideal as `(p)` over ℚ or for inert primes, `(p, b + ω)` otherwise.
pub fn prime_label(field: &FieldDescriptor, q: &PrimeIdeal) -> String {
    if field.is_rational() || q.kind == SplitType::Inert {
        format!("({})", q.p)
    } else {
        format!("({}, {}+w)", q.p, q.hnf.b)
    }
}

/// Identifying fields of a datum for report inputs.
pub fn datum_inputs(d: &EllipticDatum) -> Value {
    json!({
        "disc_k": d.field.disc,
        "prime": prime_label(&d.field, &d.prime),
        "k": d.k,
        "h": d.h,
        "rho": d.rho.to_string(),
        "u": d.u.to_string(),
        "tau": d.tau.to_string(),
        "delta": d.delta().to_string(),
    })
}

fn complex_json(z: Complex64) -> Value {
    json!([json_f64(z.re), json_f64(z.im)])
}

fn finish(mut report: VerificationReport, start: Instant) -> VerificationReport {
    report.wall_ms = start.elapsed().as_millis() as u64;
    report
}

/// One brute-force versus closed-form comparison of a local sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub regime: Regime,
    pub prime: String,
    /// Residue field size.
    pub q: u64,
    /// Power of the uniformizer in the constant `4u·π^k`.
    pub k: u32,
    pub v: u32,
    pub r: u32,
    /// `±1` at odd primes, the residue mod 8 above 2.
    pub u_class: i8,
    pub bruteforce: i128,
    /// `None` where no closed table exists.
    pub closed: Option<i128>,
}

impl TableRow {
    pub fn status(&self) -> &'static str {
        match self.closed {
            Some(c) if c == self.bruteforce => "match",
            Some(_) => "MISMATCH",
            None => "no-table",
        }
    }
}

/// Rows of a table run and the prime ideals that had to be skipped.
#[derive(Clone, Debug, Default)]
pub struct TableRun {
    pub rows: Vec<TableRow>,
    pub skipped: Vec<String>,
}

/// One unit at `q` for each square class (mod 8 above 2), with its class label.
pub fn unit_class_representatives(field: &FieldDescriptor, q: &PrimeIdeal) -> Result<Vec<(i8, AlgInt)>> {
    let wanted = if q.p == 2 { 4 } else { 2 };
    let y_max = if field.is_rational() { 0 } else { 12 };
    let mut found = BTreeMap::new();
    'search: for y in 0..=y_max {
        for x in 1..64 {
            let u = AlgInt::new(x, y);
            if let Ok(info) = classify(field, q, u, AlgInt::ONE, 0) {
                found.entry(info.class).or_insert(u);
                if found.len() == wanted {
                    break 'search;
                }
            }
        }
    }
    if found.len() < wanted {
        return Err(Error::Resource(format!("unit classes at {q}: found {} of {wanted}", found.len())));
    }
    Ok(found.into_iter().collect())
}

/// Tabulates `K̃_{𝔮^v,𝔮^r}` for the constant `4u·π^k` over every supported prime ideal above
/// the configured primes, every unit class and every `k ≤ k_max`.
pub fn kloosterman_table(field: &FieldDescriptor, spec: &TableSpec, node_cap: u64) -> Result<TableRun> {
    let mut run = TableRun::default();
    let mut tasks = Vec::new();
    for &p in &spec.primes {
        if !is_prime_u64(p) {
            return Err(Error::Config(format!("kloosterman.primes: {p} is not prime")));
        }
        for q in field.split_prime(p)? {
            if q.p == 2 && q.kind != SplitType::Split {
                run.skipped.push(format!("{}: {:?} prime above 2", prime_label(field, &q), q.kind));
                continue;
            }
            for (class, u) in unit_class_representatives(field, &q)? {
                for k in 0..=spec.k_max {
                    tasks.push((q.clone(), class, u, k));
                }
            }
        }
    }
    let blocks: Vec<Vec<TableRow>> =
        tasks.par_iter().map(|(q, class, u, k)| table_block(field, q, *class, *u, *k, spec, node_cap)).collect::<Result<_>>()?;
    run.rows = blocks.into_iter().flatten().collect();
    Ok(run)
}

fn table_block(
    field: &FieldDescriptor,
    q: &PrimeIdeal,
    class: i8,
    u: AlgInt,
    k: u32,
    spec: &TableSpec,
    node_cap: u64,
) -> Result<Vec<TableRow>> {
    let info = classify(field, q, u, q.uniformizer, k)?;
    let constant = local_constant(field, u, q.uniformizer, k);
    let mut rows = Vec::new();
    for r in 0..=spec.r_max {
        let profile = local_profile(field, q, constant, r, node_cap)?;
        for v in 0..=spec.v_max {
            let closed = match closed_value(&info, v, r) {
                Ok(c) => Some(c),
                Err(Error::UnsupportedRegime(_)) => None,
                Err(e) => return Err(e),
            };
            rows.push(TableRow {
                regime: info.regime,
                prime: prime_label(field, q),
                q: q.norm(),
                k,
                v,
                r,
                u_class: class,
                bruteforce: profile.value(v),
                closed,
            });
        }
    }
    Ok(rows)
}

/// CSV with columns `regime,q,v,r,u-class,bruteforce,closedform,match,k,prime`.
pub fn write_table_csv<W: std::io::Write>(rows: &[TableRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Resource(format!("writing CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["regime", "q", "v", "r", "u-class", "bruteforce", "closedform", "match", "k", "prime"]).map_err(io)?;
    for row in rows {
        w.write_record([
            row.regime.label().to_string(),
            row.q.to_string(),
            row.v.to_string(),
            row.r.to_string(),
            row.u_class.to_string(),
            row.bruteforce.to_string(),
            row.closed.map_or_else(|| "-".into(), |c| c.to_string()),
            row.status().to_string(),
            row.k.to_string(),
            row.prime.clone(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Resource(format!("writing CSV: {e}")))?;
    Ok(())
}

/// Report over table rows: one exact check per row that has a closed table.
pub fn table_report(run: &TableRun) -> VerificationReport {
    let mut report = VerificationReport::new("kloosterman-tables");
    for row in &run.rows {
        let inputs = json!({
            "regime": row.regime.label(), "prime": row.prime, "q": row.q, "k": row.k,
            "v": row.v, "r": row.r, "u_class": row.u_class,
        });
        if let Some(c) = row.closed {
            report.push(Check::exact("table-entry", inputs, row.bruteforce, c));
        }
    }
    let no_table = run.rows.iter().filter(|r| r.closed.is_none()).count();
    if no_table > 0 {
        report.warn(format!("{no_table} entries have no closed table and were not compared"));
    }
    for s in &run.skipped {
        report.warn(format!("skipped {s}"));
    }
    report
}

/// Truncated versus closed `𝔻(z, u)`, unit independence and local factors for every datum.
pub fn verify_dirichlet(cfg: &RunConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let field = cfg.field()?;
    let data = cfg.data_for(&field)?;
    let spec = &cfg.dirichlet;
    let units = unit_sweep(&field, cfg.unit(&field)?);
    let truncation = spec.truncation();
    let mut report = VerificationReport::new("verify-dirichlet");
    report.budget = json!({ "truncation": format!("{truncation:?}"), "local_norm_max": spec.local_norm_max });
    for datum in &data {
        for z in spec.z.iter().map(|z| z.to_complex()) {
            let mut inputs = datum_inputs(datum);
            inputs["z"] = complex_json(z);
            let swept: Vec<Result<EllipticDatum>> = units
                .iter()
                .map(|w| EllipticDatum::new(&field, &datum.prime, datum.h, datum.rho, datum.k, field.mul(datum.u, *w), datum.tau))
                .collect();
            let values: Vec<Result<_>> = swept
                .par_iter()
                .map(|d| d.as_ref().map_err(Clone::clone).and_then(|d| global_dirichlet(d, z, truncation)))
                .collect();
            let mut base: Option<Complex64> = None;
            for (w, value) in units.iter().zip(values) {
                let mut inputs = inputs.clone();
                inputs["unit_factor"] = json!(w.to_string());
                match value {
                    Ok(g) => {
                        inputs["tail_bound"] = json_f64(g.eval.tail_bound);
                        report.push(Check::complex("global-vs-closed", inputs.clone(), g.eval.value, g.closed, spec.tolerance));
                        match base {
                            None => base = Some(g.eval.value),
                            Some(b) => {
                                report.push(Check::complex("unit-independence", inputs, g.eval.value, b, spec.unit_tolerance))
                            }
                        }
                    }
                    Err(e) => report.push(Check::failed("global-vs-closed", inputs, e.to_string())),
                }
            }
            local_factor_checks(&mut report, datum, z, spec.local_norm_max);
        }
    }
    Ok(finish(report, start))
}

/// Units multiplying `u` in the sweep: `{1, −1}` over ℚ, `{1, β, −β, β²}` otherwise.
pub fn unit_sweep(field: &FieldDescriptor, beta: Option<AlgInt>) -> Vec<AlgInt> {
    match beta {
        None => vec![AlgInt::ONE, field.neg(AlgInt::ONE)],
        Some(b) => vec![AlgInt::ONE, b, field.neg(b), field.mul(b, b)],
    }
}

fn local_factor_checks(report: &mut VerificationReport, datum: &EllipticDatum, z: Complex64, norm_max: u64) {
    let field = &datum.field;
    let primes = match field.primes_up_to_norm(norm_max) {
        Ok(p) => p,
        Err(e) => return report.push(Check::failed("local-factor", json!({ "norm_max": norm_max }), e.to_string())),
    };
    let constant = local_constant(field, datum.u, datum.rho, datum.k_prime());
    for q in primes.iter().filter(|q| q.p != 2 || q.kind == SplitType::Split) {
        let mut inputs = json!({ "prime": prime_label(field, q), "z": complex_json(z) });
        let closed = local_dirichlet_closed(field, q, z, datum.u, datum.rho, datum.k_prime());
        let truncated =
            closed.as_ref().map_err(Clone::clone).and_then(|c| local_dirichlet_auto(field, q, z, constant, 1e-10 * c.norm()));
        match (closed, truncated) {
            (Ok(c), Ok(t)) => {
                inputs["regime"] =
                    json!(classify(field, q, datum.u, datum.rho, datum.k_prime()).map(|i| i.regime.label()).unwrap_or("?"));
                inputs["tail_bound"] = json_f64(t.tail_bound);
                // Within the tail bound up to rounding, and within 10⁻⁸ relatively.
                let tol = (t.tail_bound + 1e-14 * c.norm()).min(1e-8 * c.norm());
                report.push(Check::complex("local-factor", inputs, t.value, c, tol));
            }
            (Err(e), _) | (_, Err(e)) => report.push(Check::failed("local-factor", inputs, e.to_string())),
        }
    }
}

/// Functional-equation sweep and approximate functional equation over ℚ.
pub fn verify_lfun(cfg: &RunConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    if !cfg.field()?.is_rational() {
        return Err(Error::Config("verify-lfun evaluates inside the critical strip over ℚ only".into()));
    }
    let spec = &cfg.lfun;
    let budget = AfeBudget::level(spec.level);
    let mut report = VerificationReport::new("verify-lfun");
    report.budget = json!({
        "afe_level": spec.level, "contour_height": budget.contour.height, "contour_step": budget.contour.step,
        "f_cut": budget.f_cut, "h_cut": budget.h_cut,
    });
    if spec.deltas.is_empty() {
        report.warn("no discriminants configured; the suite passes vacuously".into());
    }
    let outcomes: Vec<VerificationReport> = spec.deltas.par_iter().map(|&delta| lfun_for_delta(delta, cfg, &budget)).collect();
    for r in outcomes {
        report.extend(r);
    }
    Ok(finish(report, start))
}

fn lfun_for_delta(delta: i64, cfg: &RunConfig, budget: &AfeBudget) -> VerificationReport {
    let spec = &cfg.lfun;
    let mut report = VerificationReport::new("verify-lfun");
    let datum = match EllipticDatum::rational_with_delta(delta as i128) {
        Ok(d) => d,
        Err(e) => {
            report.push(Check::failed("datum", json!({ "delta": delta }), e.to_string()));
            return report;
        }
    };
    for &z in &spec.z {
        report.extend(verify_functional_equation(&datum, z, spec.tolerance));
    }
    let mut inputs = datum_inputs(&datum);
    match afe_verify(&datum, spec.afe_z, spec.alpha, budget) {
        Ok(afe) => {
            inputs["afe"] = afe.to_json();
            report.push(Check::numeric("afe", inputs, afe.left, afe.right, spec.afe_tolerance));
        }
        Err(e) => report.push(Check::failed("afe", inputs, e.to_string())),
    }
    report
}

/// Orbital, congruence and symbol checks.
pub fn verify_orbital(cfg: &RunConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let field = cfg.field()?;
    let spec = &cfg.orbital;
    let mut report = VerificationReport::new("verify-orbital");
    report.budget = json!({ "delta_max": spec.delta_max, "d_max": spec.d_max, "random": spec.random, "seed": cfg.seed() });
    for datum in cfg.data_for(&field)? {
        orbital_datum_checks(&mut report, &datum);
    }
    if field.is_rational() {
        if spec.delta_max > 0 {
            report.push(congruence_exhaustive(spec.delta_max, spec.d_max));
        }
    } else {
        report.warn("the exhaustive congruence check runs over ℚ only".into());
    }
    let beta = cfg.unit(&field)?;
    let sample = random_orbital_sample(&field, beta, spec, cfg.seed())?;
    report.extend(random_orbital_checks(&field, &sample));
    Ok(finish(report, start))
}

fn orbital_datum_checks(report: &mut VerificationReport, datum: &EllipticDatum) {
    let inputs = datum_inputs(datum);
    match (datum.finite_orbital(), datum.finite_orbital_product()) {
        (Ok(a), Ok(b)) => {
            let mut inputs = inputs.clone();
            inputs["finite_part"] = json!(a.rational.to_string());
            report.push(Check::exact("orbital-divisor-vs-product", inputs, a.rational, b.rational));
        }
        (Err(e), _) | (_, Err(e)) => report.push(Check::failed("orbital-divisor-vs-product", inputs.clone(), e.to_string())),
    }
    match (finite_part(datum), finite_part_by_characters(datum)) {
        (Ok(a), Ok(b)) => report.push(Check::exact("finite-part-groupings", inputs, a, b)),
        (Err(e), _) | (_, Err(e)) => report.push(Check::failed("finite-part-groupings", inputs, e.to_string())),
    }
}

/// `S_γ` from the conductor of `δ = f²D` and `𝔡 | S_γ` from the congruence criterion, against
/// direct divisibility of `f`, for every admissible `0 < |δ| ≤ delta_max` and `d ≤ d_max`.
pub fn congruence_exhaustive(delta_max: i64, d_max: i64) -> Check {
    let field = FieldDescriptor::rational();
    let ideals: Vec<Ideal> = (1..=d_max).map(|d| field.principal(AlgInt::int(d as i128)).expect("nonzero")).collect();
    let deltas: Vec<i64> = (-delta_max..=delta_max).filter(|&d| fundamental_part(d).is_some()).collect();
    let outcomes: Vec<(usize, Option<String>)> = deltas
        .par_iter()
        .map(|&delta| {
            let (_, f) = fundamental_part(delta).expect("filtered");
            let alpha = AlgInt::int(delta as i128);
            let mut bad = 0;
            let mut first = None;
            let mut note = |msg: String| {
                bad += 1;
                first.get_or_insert(msg);
            };
            match DiscriminantData::from_delta(&field, alpha) {
                Ok(data) if data.s.norm as i64 == f => {}
                Ok(data) => note(format!("δ = {delta}: S has norm {}, conductor {f}", data.s.norm)),
                Err(e) => note(format!("δ = {delta}: {e}")),
            }
            for (d, ideal) in (1..=d_max).zip(&ideals) {
                match crate::elliptic::divides_s_gamma_delta(&field, alpha, ideal) {
                    Ok(got) if got == (f % d == 0) => {}
                    Ok(got) => note(format!("δ = {delta}, d = {d}: criterion {got}, direct {}", f % d == 0)),
                    Err(e) => note(format!("δ = {delta}, d = {d}: {e}")),
                }
            }
            (bad, first)
        })
        .collect();
    let mismatches: usize = outcomes.iter().map(|o| o.0).sum();
    let first = outcomes.into_iter().find_map(|o| o.1);
    let inputs = json!({
        "delta_max": delta_max, "d_max": d_max, "discriminants": deltas.len(),
        "first_mismatch": first,
    });
    Check::exact("congruence-equivalence", inputs, mismatches, 0)
}

/// A random datum with a chosen divisor `𝔡 | S_γ` and ideal `𝔞`.
#[derive(Clone, Debug)]
pub struct OrbitalInstance {
    pub datum: EllipticDatum,
    pub d: Ideal,
    pub a: Ideal,
}

/// `count` random regular elliptic data with `δ` of manageable size, drawn deterministically
/// from `seed`.
pub fn random_orbital_sample(
    field: &FieldDescriptor,
    beta: Option<AlgInt>,
    spec: &OrbitalSpec,
    seed: u64,
) -> Result<Vec<OrbitalInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut primes = Vec::new();
    for q in field.primes_up_to_norm(13)? {
        if let Some(rho) = field.find_generator(&field.prime_power(&q, 1), 200) {
            primes.push((q, rho));
        }
    }
    let units: Vec<AlgInt> = unit_sweep(field, beta).into_iter().flat_map(|w| [w, field.neg(w)]).collect();
    let small = field.enumerate_by_norm(200)?;
    let mut out = Vec::with_capacity(spec.random);
    let mut attempts = 0usize;
    while out.len() < spec.random {
        attempts += 1;
        if attempts > 100 * spec.random + 1000 {
            return Err(Error::Resource("could not draw enough regular elliptic data".into()));
        }
        let (q, rho) = primes.choose(&mut rng).expect("some small prime");
        let k = rng.gen_range(0..4u32);
        let u = *units.choose(&mut rng).expect("units");
        let tau = if field.is_rational() {
            AlgInt::int(rng.gen_range(-300..=300))
        } else {
            AlgInt::new(rng.gen_range(-40..=40), rng.gen_range(-12..=12))
        };
        let datum = EllipticDatum::new(field, q, 1, *rho, k, u, tau)?;
        let Ok(data) = datum.s_gamma() else { continue };
        let divisors = divisor_ideals(field, &data.s);
        let d = divisors.choose(&mut rng).expect("unit ideal divides").clone();
        let a = small.choose(&mut rng).expect("ideals").clone();
        out.push(OrbitalInstance { datum, d, a });
    }
    Ok(out)
}

fn divisor_ideals(field: &FieldDescriptor, s: &Ideal) -> Vec<Ideal> {
    let mut out: Vec<Vec<(PrimeIdeal, u32)>> = vec![Vec::new()];
    for (q, e) in &s.factors {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=*e).map(move |j| {
                    let mut w = v.clone();
                    if j > 0 {
                        w.push((q.clone(), j));
                    }
                    w
                })
            })
            .collect();
    }
    out.iter().map(|f| field.ideal_from_factors(f)).collect()
}

#[derive(Default)]
struct Tally {
    cases: usize,
    mismatches: usize,
    first: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: Result<bool>, what: impl FnOnce() -> String) {
        self.cases += 1;
        let bad = match ok {
            Ok(true) => return,
            Ok(false) => what(),
            Err(e) => format!("{}: {e}", what()),
        };
        self.mismatches += 1;
        self.first.get_or_insert(bad);
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.mismatches += other.mismatches;
        if self.first.is_none() {
            self.first = other.first;
        }
    }

    fn check(self, name: &str, extra: Value) -> Check {
        let inputs = json!({ "instances": self.cases, "first_mismatch": self.first, "scope": extra });
        Check::exact(name, inputs, self.mismatches, 0)
    }
}

/// Exact checks over a random sample: divisor sum against local product of the finite
/// orbital value, and `χ_𝔡(𝔞)` against the modified symbol (and Kronecker over ℚ).
pub fn random_orbital_checks(field: &FieldDescriptor, sample: &[OrbitalInstance]) -> VerificationReport {
    let tallies: Vec<[Tally; 3]> = sample
        .par_iter()
        .map(|inst| {
            let mut t: [Tally; 3] = Default::default();
            let g = &inst.datum;
            let label = || format!("τ = {}, u = {}, 𝔭 = {}^{}", g.tau, g.u, prime_label(field, &g.prime), g.k);
            t[0].record(g.finite_orbital().and_then(|a| Ok(a.rational == g.finite_orbital_product()?.rational)), label);
            let delta = g.delta();
            t[1].record(
                chi_d(g, &inst.d, &inst.a).and_then(|c| Ok(c == modified_hilbert(field, delta, &inst.d, &inst.a)?)),
                || format!("{}, 𝔡 = {}, 𝔞 = {}", label(), inst.d, inst.a),
            );
            if field.is_rational() {
                let d = inst.d.norm as i128;
                let a = inst.a.norm as i128;
                t[2].record(
                    modified_hilbert(field, delta, &inst.d, &inst.a).map(|m| m == kronecker_i128(delta.x / (d * d), a)),
                    || format!("δ = {}, d = {d}, a = {a}", delta.x),
                );
            }
            t
        })
        .collect();
    let mut totals: [Tally; 3] = Default::default();
    for t in tallies {
        for (acc, x) in totals.iter_mut().zip(t) {
            acc.merge(x);
        }
    }
    let [orbital, chi, kron] = totals;
    let scope = json!({ "disc_k": field.disc });
    let mut report = VerificationReport::new("verify-orbital");
    report.push(orbital.check("orbital-divisor-vs-product", scope.clone()));
    report.push(chi.check("chi-d-vs-modified-symbol", scope.clone()));
    if field.is_rational() {
        report.push(kron.check("modified-symbol-vs-kronecker", scope));
    }
    report
}
