//! Acceptance run: one PASS/FAIL line per criterion, with the measured
//! residuals and runtimes. Exits non-zero on failure only when
//! `ACCEPTANCE_STRICT` is set, so that the remaining test targets still run.

use pii_tau::cauchy::Numerics;
use pii_tau::cli::{execute, Command, Format, RunConfig};
use pii_tau::fredholm::fredholm_det;
use pii_tau::monodromy::params_from_pair;
use pii_tau::registry::{run_named, IdentityResult};
use pii_tau::tau::{divisor_scan, divisor_scan_with, Region};
use pii_tau::{Result, C64};
use std::time::Instant;

struct Line {
    pass: bool,
    parts: Vec<String>,
}

impl Line {
    fn new() -> Self {
        Line { pass: true, parts: Vec::new() }
    }

    fn check(&mut self, label: &str, ok: bool, detail: String) {
        self.pass &= ok;
        self.parts.push(format!("{label} {} ({detail})", if ok { "ok" } else { "MISS" }));
    }

    fn case(&mut self, label: &str, name: &str, tolerance: f64) {
        let r: IdentityResult = run_named(name).unwrap_or_else(|| panic!("unknown registry case {name}"));
        let ok = r.error.is_none() && r.residual <= tolerance;
        let detail = match &r.error {
            Some(e) => format!("error: {e}"),
            None => format!("{:.2e} vs {:.0e}, {} samples", r.residual, tolerance, r.samples),
        };
        self.check(label, ok, detail);
    }
}

fn criterion(results: &mut Vec<(usize, bool)>, number: usize, title: &str, limit_s: f64, body: impl FnOnce(&mut Line)) {
    let start = Instant::now();
    let mut line = Line::new();
    body(&mut line);
    let secs = start.elapsed().as_secs_f64();
    line.check("runtime", secs < limit_s, format!("{secs:.1} s vs {limit_s} s"));
    println!("criterion {number} [{title}] {}: {}", if line.pass { "PASS" } else { "FAIL" }, line.parts.join("; "));
    results.push((number, line.pass));
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn run_to_bytes(cfg: &RunConfig) -> Vec<u8> {
    let mut buf = Vec::new();
    execute(cfg, &mut buf).expect("run succeeds");
    buf
}

fn main() {
    let mut results = Vec::new();
    let mp = params_from_pair(c(0.0, 2.0), c(0.0, 1.0)).expect("admissible");

    criterion(&mut results, 1, "special functions", 5.0, |l| {
        l.case("recurrence", "pcf_recurrence", 1e-9);
        l.case("derivative identity", "pcf_derivative", 1e-9);
        l.case("ODE residual", "pcf_ode_analytic", 1e-9);
        l.case("Wronskian", "pcf_wronskian", 1e-9);
    });

    criterion(&mut results, 2, "monodromy identities", 1.0, |l| {
        l.case("Stokes constraint", "stokes_constraint", 1e-12);
        l.case("1 + h0 h1 = exp(2πiν)", "monodromy_identity", 1e-10);
    });

    criterion(&mut results, 3, "jump matrix", 30.0, |l| {
        l.case("det J = 1", "jump_unimodular", 1e-8);
        l.case("C(z) = B(-z) exactly", "jump_reflection", 0.0);
        l.case("closed forms vs parametrix product", "jump_closed_forms", 1e-8);
        l.case("no monodromy", "no_monodromy", 1e-8);
        l.case("|J(iy) - I| at |y| = 20", "jump_decay", 1e-3);
    });

    criterion(&mut results, 4, "determinant routes", 120.0, |l| {
        l.case("trace expansion", "det_trace_route", 1e-6);
        l.case("block vs composed (Schur)", "det_schur", 1e-8);
        l.case("block vs single contour", "det_block_vs_single", 1e-6);
        l.case("eps sweep", "det_eps_invariance", 1e-6);
        l.case("node doubling contraction ratio", "det_node_doubling", 0.5);
    });

    criterion(&mut results, 5, "correction terms", 120.0, |l| {
        l.case("analytic derivatives vs differences", "jump_derivatives", 1e-6);
        l.case("sector integrals vs 2iν/3 + ν²/t", "sector_closed_form", 1e-4);
        l.case("calF under node doubling and eps", "corrections_stability", 1e-6);
    });

    criterion(&mut results, 6, "assembly", 180.0, |l| {
        l.case("aggregation identity", "tau_aggregation", 0.0);
        l.case("resolvent trace vs differences", "tau_trace_vs_fd", 1e-6);
        let num = Numerics::default();
        let ts = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let dev: Vec<f64> = ts
            .iter()
            .map(|&t| fredholm_det(c(t, 0.0), &mp, &num, false).map(|d| (d.det - 1.0).norm()).unwrap_or(f64::NAN))
            .collect();
        let monotone = dev.windows(2).all(|w| w[1] <= w[0]);
        let shown: Vec<String> = ts.iter().zip(&dev).map(|(t, d)| format!("{t}:{d:.1e}")).collect();
        l.check("|det - 1| monotone on t = 2..8 [advisory]", monotone, shown.join(" "));
        let ratio = dev[0] / dev[dev.len() - 1];
        l.check("|det - 1| drops 10x from t = 2 to 8 [advisory]", ratio >= 10.0, format!("ratio {ratio:.2}"));
    });

    criterion(&mut results, 7, "divisor machinery", 600.0, |l| {
        l.case("synthetic zero recovery", "synthetic_zero", 1e-8);
        let t0 = c(1.7, 2.9);
        let f = move |t: C64| -> Result<C64> { Ok((t - t0) * (0.3 * t).cos()) };
        let box7 = Region { re0: 1.5, re1: 2.5, im0: 2.5, im1: 3.5 };
        match divisor_scan_with(&f, &box7, 20, 20) {
            Ok(s) => {
                let err = s.hits.iter().map(|h| (h.t_root - t0).norm()).fold(f64::INFINITY, f64::min);
                l.check("injected zero found by scan", s.hits.len() == 1 && err < 1e-8, format!("{} hits, error {err:.1e}", s.hits.len()));
            }
            Err(e) => l.check("injected zero found by scan", false, e.to_string()),
        }
        let start = Instant::now();
        match divisor_scan(&box7, 20, 20, &mp, &Numerics::default().with_nodes(128)) {
            Ok(s) => {
                let secs = start.elapsed().as_secs_f64();
                let roots: Vec<String> = s.hits.iter().map(|h| format!("{:.6} (winding {})", h.t_root, h.winding)).collect();
                l.check("20x20 scan at n = 128", secs < 600.0, format!("{secs:.1} s, hits [{}]", roots.join(", ")));
                l.check("argument principle on every hit", s.hits.iter().all(|h| h.winding >= 1), format!("{} hits", s.hits.len()));
            }
            Err(e) => l.check("20x20 scan at n = 128", false, e.to_string()),
        }
    });

    criterion(&mut results, 8, "determinism", 120.0, |l| {
        let base = RunConfig {
            command: Command::Eval,
            s1: Some(c(0.0, 2.0)),
            s3: Some(c(0.0, 1.0)),
            t: Some(c(2.0, 0.5)),
            region: Some(Region { re0: 1.0, re1: 2.0, im0: 0.0, im1: 1.0 }),
            grid: (3, 2),
            numerics: Numerics::default().with_nodes(96),
            format: Format::Json,
            out: None,
            selftest_filter: Some("stokes".into()),
            timing: false,
        };
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
        for (command, format) in [
            (Command::Eval, Format::Json),
            (Command::Scan, Format::Json),
            (Command::Scan, Format::Csv),
            (Command::Divisor, Format::Json),
            (Command::Selftest, Format::Json),
        ] {
            let cfg = RunConfig { command, format, ..base.clone() };
            let a = run_to_bytes(&cfg);
            let b = single.install(|| run_to_bytes(&cfg));
            l.check(&format!("{command:?}/{format:?}"), a == b && !a.is_empty(), format!("{} bytes", a.len()));
        }
    });

    let failed: Vec<String> = results.iter().filter(|r| !r.1).map(|r| r.0.to_string()).collect();
    println!("acceptance: {} of {} criteria pass; failing: [{}]", results.len() - failed.len(), results.len(), failed.join(", "));
    if !failed.is_empty() && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
