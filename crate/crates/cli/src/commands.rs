use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cgf_core::approx_group::approximate_extreme_z;
use cgf_core::approx_truncated::approximate_extreme_zplus;
use cgf_core::ccgf::{
    analyze_simplex, approximate_extreme_2d, classify_max_s_free_2d, construct_delta_n,
    extremality_2d, gauge_distance_2d, separation_certificate, simplex_extreme_test,
    ExtremalityVerdict, SFreePolyhedron,
};
use cgf_core::minimality::check_strongly_minimal;
use cgf_core::pwl::{distance_on_interval, sup_distance};
use cgf_core::{CutFunction, GroupProblem, MinimalityReport, PeriodicSource, QuasiPeriodicPwl, Rational};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::plot;

/// What a command produced: `ok` selects exit code 0 or 1, `message` goes
/// to stdout on success and stderr otherwise.
#[derive(Debug)]
pub struct Outcome {
    pub ok: bool,
    pub message: String,
}

/// JSON written by `--report`. Every core quantity is an exact rational.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub ok: bool,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reverification: Option<Value>,
    pub timings_us: BTreeMap<&'static str, u64>,
}

#[derive(Debug, Serialize)]
struct FunctionCheck {
    file: PathBuf,
    minimality: MinimalityReport,
    distance: Rational,
    ok: bool,
}

struct Timer(BTreeMap<&'static str, u64>);

impl Timer {
    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.0.insert(stage, t.elapsed().as_micros() as u64);
        out
    }
}

pub fn run(cli: Cli, argv: Vec<String>) -> CliResult<Outcome> {
    let ctx = Ctx {
        argv,
        timer: Timer(BTreeMap::new()),
    };
    match cli.command {
        Command::Verify(a) => ctx.verify(a),
        Command::ApproxZ(a) => ctx.approx_z(a),
        Command::ApproxZplus(a) => ctx.approx_zplus(a),
        Command::Ccgf(c) => match c {
            CcgfCommand::Classify(a) => ctx.classify(a),
            CcgfCommand::Extreme(a) => ctx.extreme(a),
            CcgfCommand::Approx2d(a) => ctx.approx2d(a),
            CcgfCommand::DeltaN(a) => ctx.delta_n(a),
            CcgfCommand::Certificate(a) => ctx.certificate(a),
        },
        Command::Plot(a) => plot_cmd(a),
        Command::Sample(a) => sample_cmd(a),
    }
}

struct Ctx {
    argv: Vec<String>,
    timer: Timer,
}

impl Ctx {
    fn finish(
        self,
        report: Option<&PathBuf>,
        ok: bool,
        result: &impl Serialize,
        reverification: Option<&impl Serialize>,
        message: String,
    ) -> CliResult<Outcome> {
        if let Some(path) = report {
            let r = RunReport {
                command: self.argv,
                ok,
                result: to_value(result),
                reverification: reverification.map(to_value),
                timings_us: self.timer.0,
            };
            write_json(path, &r)?;
        }
        Ok(Outcome { ok, message })
    }

    fn verify(mut self, a: VerifyArgs) -> CliResult<Outcome> {
        let f = read_json::<CutFunction>(&a.input)?.to_quasi();
        let problem = match a.lattice {
            LatticeArg::Z => GroupProblem::affine(&a.b)?,
            LatticeArg::Zplus => GroupProblem::truncated(&a.b)?,
        };
        let rep = self.timer.time("verify", || check_strongly_minimal(&f, &problem))?;
        let ok = if a.expect_extreme {
            rep.extreme_certified
        } else {
            rep.is_strongly_minimal
        };
        let mut message = format!(
            "strongly minimal: {}, slopes: {}, extreme certified: {}",
            rep.is_strongly_minimal, rep.slope_count, rep.extreme_certified
        );
        if !ok {
            message.push('\n');
            message.push_str(&describe_failure(&rep, &f));
        }
        self.finish(a.report.as_ref(), ok, &rep, None::<&()>, message)
    }

    fn approx_z(mut self, a: ApproxZArgs) -> CliResult<Outcome> {
        let source = match read_json::<CutFunction>(&a.input)? {
            CutFunction::Grid(g) => PeriodicSource::Grid(g),
            other => PeriodicSource::Pwl(other.to_quasi().to_unit_periodic()?),
        };
        let input = source.to_pwl();
        let out = self.timer.time("approximate", || approximate_extreme_z(&source, &a.b, &a.eps))?;
        write_json(&a.out, &CutFunction::Periodic(out.pistar.clone()))?;

        let check = self.timer.time("reverify", || -> CliResult<FunctionCheck> {
            let back = read_json::<CutFunction>(&a.out)?.to_quasi();
            let minimality = check_strongly_minimal(&back, &GroupProblem::affine(&a.b)?)?;
            let distance = sup_distance(&back.to_unit_periodic()?, &input);
            let ok = minimality.extreme_certified && distance <= a.eps;
            Ok(FunctionCheck {
                file: a.out.clone(),
                minimality,
                distance,
                ok,
            })
        })?;

        if let Some(path) = &a.plot {
            let (lo, hi) = (Rational::zero(), Rational::one());
            let curves = [
                plot::Curve::new(input.as_quasi(), &lo, &hi, a.samples),
                plot::Curve::new(out.pistar.as_quasi(), &lo, &hi, a.samples),
            ];
            write_text(path, &plot::svg(&curves, &lo, &hi))?;
        }
        if let Some(n) = a.csv {
            let xs = plot::uniform(&Rational::zero(), &Rational::one(), n.max(1));
            write_text(&a.out.with_extension("csv"), &plot::csv(out.pistar.as_quasi(), &xs))?;
        }

        let r = &out.report;
        let message = format!(
            "wrote {}: q = {}, delta = {}, gamma = {}, distance = {} (eps = {}), re-verified: {}",
            a.out.display(),
            r.q,
            r.delta,
            r.gamma,
            check.distance,
            a.eps,
            check.ok
        );
        let ok = check.ok;
        self.finish(a.report.as_ref(), ok, r, Some(&check), message)
    }

    fn approx_zplus(mut self, a: ApproxZplusArgs) -> CliResult<Outcome> {
        let pibar = read_json::<CutFunction>(&a.input)?.to_quasi();
        let out = self.timer.time("approximate", || {
            approximate_extreme_zplus(&pibar, &a.b, &a.m, &a.eps)
        })?;
        write_json(&a.out, &CutFunction::QuasiPeriodic(out.pistar.clone()))?;

        let check = self.timer.time("reverify", || -> CliResult<FunctionCheck> {
            let back = read_json::<CutFunction>(&a.out)?.to_quasi();
            let minimality = check_strongly_minimal(&back, &GroupProblem::truncated(&a.b)?)?;
            let distance = distance_on_interval(&back, &pibar, &a.m)?;
            let ok = minimality.extreme_certified && distance <= a.eps;
            Ok(FunctionCheck {
                file: a.out.clone(),
                minimality,
                distance,
                ok,
            })
        })?;

        let r = &out.report;
        let message = format!(
            "wrote {}: alpha = {}, beta = {}, eps' = {}, distance on [-M, M] = {} (eps = {}), re-verified: {}",
            a.out.display(),
            r.params.alpha,
            r.beta,
            r.eps_prime,
            check.distance,
            a.eps,
            check.ok
        );
        let ok = check.ok;
        self.finish(a.report.as_ref(), ok, r, Some(&check), message)
    }

    fn classify(mut self, a: PolyArgs) -> CliResult<Outcome> {
        let k = read_json::<SFreePolyhedron>(&a.input)?;
        let c = self.timer.time("classify", || classify_max_s_free_2d(&k))?;
        let message = pretty(&c);
        self.finish(a.report.as_ref(), true, &c, None::<&()>, message)
    }

    fn extreme(mut self, a: PolyArgs) -> CliResult<Outcome> {
        let k = read_json::<SFreePolyhedron>(&a.input)?;
        let v = self.timer.time("extreme", || verdict(&k))?;
        let message = pretty(&v);
        self.finish(a.report.as_ref(), v.extreme, &v, None::<&()>, message)
    }

    fn approx2d(mut self, a: Approx2dArgs) -> CliResult<Outcome> {
        let k = read_json::<SFreePolyhedron>(&a.input)?;
        let out = self.timer.time("approximate", || approximate_extreme_2d(&k, &a.eps))?;
        write_json(&a.out, &out.polyhedron)?;
        let check = self.timer.time("reverify", || -> CliResult<Value> {
            let back = read_json::<SFreePolyhedron>(&a.out)?;
            let v = verdict(&back)?;
            let distance = gauge_distance_2d(&k, &back)?;
            let ok = v.extreme && distance <= a.eps;
            Ok(json!({ "file": a.out, "verdict": v, "distance": distance, "ok": ok }))
        })?;
        let ok = check["ok"] == Value::Bool(true);
        let message = format!(
            "wrote {}: {:?}, distance = {} (eps = {}), re-verified: {ok}",
            a.out.display(),
            out.classification.kind,
            out.distance,
            a.eps
        );
        self.finish(a.report.as_ref(), ok, &out, Some(&check), message)
    }

    fn delta_n(mut self, a: DeltaNArgs) -> CliResult<Outcome> {
        let d = self.timer.time("construct", || construct_delta_n(a.n, &a.eps, &a.epsbar))?;
        write_json(&a.out, &d.polyhedron)?;
        let check = self.timer.time("reverify", || -> CliResult<Value> {
            let back = read_json::<SFreePolyhedron>(&a.out)?;
            let analysis = analyze_simplex(&back)?;
            let ok = back == d.polyhedron && analysis.facet_points.len() == a.n + 1 && !analysis.verdict.extreme;
            Ok(json!({ "file": a.out, "analysis": analysis, "ok": ok }))
        })?;
        let ok = check["ok"] == Value::Bool(true);
        let message = format!(
            "wrote {}: {} lattice points, affine hull rank {}, extreme: {}, re-verified: {ok}",
            a.out.display(),
            d.lattice_points.len(),
            d.analysis.rank,
            d.analysis.verdict.extreme
        );
        self.finish(a.report.as_ref(), ok, &d, Some(&check), message)
    }

    fn certificate(mut self, a: PolyArgs) -> CliResult<Outcome> {
        let k = read_json::<SFreePolyhedron>(&a.input)?;
        let c = self.timer.time("certificate", || separation_certificate(&k))?;
        let message = pretty(&c);
        self.finish(a.report.as_ref(), true, &c, None::<&()>, message)
    }
}

fn verdict(k: &SFreePolyhedron) -> cgf_core::Result<ExtremalityVerdict> {
    if k.n() == 2 {
        extremality_2d(&classify_max_s_free_2d(k)?)
    } else {
        simplex_extreme_test(k)
    }
}

fn plot_cmd(a: PlotArgs) -> CliResult<Outcome> {
    if a.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let f = read_json::<CutFunction>(&a.input)?.to_quasi();
    let (lo, hi) = plot::domain(&f, a.m.as_ref());
    let mut curves = vec![plot::Curve::new(&f, &lo, &hi, a.samples)];
    if let Some(g) = &a.overlay {
        let g = read_json::<CutFunction>(g)?.to_quasi();
        curves.push(plot::Curve::new(&g, &lo, &hi, a.samples));
    }
    write_text(&a.out, &plot::svg(&curves, &lo, &hi))?;
    Ok(Outcome {
        ok: true,
        message: format!("wrote {}", a.out.display()),
    })
}

fn sample_cmd(a: SampleArgs) -> CliResult<Outcome> {
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let f = read_json::<CutFunction>(&a.input)?.to_quasi();
    let (lo, hi) = plot::domain(&f, a.m.as_ref());
    let mut xs = plot::uniform(&lo, &hi, a.samples);
    if a.m.is_some() {
        xs.push(hi);
    }
    let text = plot::csv(&f, &xs);
    match &a.out {
        Some(path) => {
            write_text(path, &text)?;
            Ok(Outcome {
                ok: true,
                message: format!("wrote {}", path.display()),
            })
        }
        None => Ok(Outcome {
            ok: true,
            message: text.trim_end().to_string(),
        }),
    }
}

fn describe_failure(rep: &MinimalityReport, f: &QuasiPeriodicPwl) -> String {
    let mut lines = Vec::new();
    if !rep.boundary_conditions_hold {
        lines.push("boundary conditions fail (value at 0, at -1 or a negative value)".to_string());
    }
    if let Some(w) = &rep.subadditivity_witness {
        lines.push(format!(
            "subadditivity fails at x = {}, y = {}: slack {}",
            w.x, w.y, w.slack
        ));
    }
    if let Some(r) = &rep.symmetry_witness {
        let b = rep.problem.b();
        let sum = f.eval(r) + f.eval(&(b - r));
        lines.push(format!("symmetry fails at r = {r}: f(r) + f(b - r) = {sum}"));
    }
    if rep.nonnegative_on_halfline == Some(false) {
        lines.push("negative somewhere on [0, inf)".to_string());
    }
    if rep.is_strongly_minimal && !rep.extreme_certified {
        lines.push(format!("{} slopes, so the 2-slope certificate does not apply", rep.slope_count));
    }
    lines.join("\n")
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn pretty(x: &impl Serialize) -> String {
    serde_json::to_string_pretty(x).expect("report types serialize")
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json(path: &Path, x: &impl Serialize) -> CliResult<()> {
    write_text(path, &(pretty(x) + "\n"))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
