use std::fs;
use std::path::{Path, PathBuf};

use msforge_core::classify::{candidate_catalog, render_table, tables, Table};
use msforge_core::families::Surface;
use msforge_core::geometry::{
    build_mesh, calibrate, end_orders, export_obj, family_symmetries, jorge_meeks_check,
    symmetry_check_many, symmetry_group, total_curvature, write_ply, EndReport, Immersion,
    JorgeMeeks, MeshMetadata, MeshOptions, SymmetryReport, TotalCurvature,
};
use msforge_core::integrator::{verify_periods, PeriodReport};
use msforge_core::periods::{
    closure_residual, nonexistence_report, solve_a, solve_genus_family, weber_solve,
    NonexistenceCase, SolvedParams,
};
use msforge_core::{Error, Result};
use serde::Serialize;

use super::{Builtin, Command, Family, RunConfig};

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<u8> {
    match cmd {
        Command::Solve {
            family,
            gamma,
            k,
            out,
        } => solve(family, gamma, k, &out, cfg),
        Command::Verify {
            params,
            builtin,
            report,
            samples,
        } => verify(
            &load(params.as_deref(), builtin)?,
            report.as_deref(),
            samples,
            cfg,
        ),
        Command::Mesh {
            params,
            builtin,
            out,
            ply,
            radial,
            angular,
            r_min,
            r_max,
            force,
        } => {
            let opts = MeshOptions {
                radial: radial.unwrap_or(cfg.res),
                angular: angular.unwrap_or(cfg.res),
                range: r_min.zip(r_max),
                closure_tol: cfg.tol_period,
                force,
            };
            mesh(
                &load(params.as_deref(), builtin)?,
                &opts,
                &out,
                ply.as_deref(),
            )
        }
        Command::Classify {
            gamma,
            max_gamma,
            ends,
            json,
        } => classify(gamma, max_gamma, ends, json.as_deref()),
        Command::Nonexist { case, json } => nonexist(case.as_deref(), json.as_deref()),
        Command::Weber { gamma, out } => {
            let sol = weber_solve(gamma, cfg.tol_period, None)?;
            let s = Surface::weber_family(gamma, sol.c, &sol.a)?;
            write_params(&SolvedParams::from_surface(&s, sol.residual), &out)
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

fn write_params(p: &SolvedParams, out: &Path) -> Result<u8> {
    write_json(p, out)?;
    let mut line = format!("{}: c = {:.12}", p.family.name(), p.c);
    if let Some(a) = p.a {
        line += &format!(", a = {a:.12}");
    }
    if let Some(a) = &p.a_values {
        line += &format!(", a = {a:?}");
    }
    println!("{line}, residual {:.2e} -> {}", p.residual, out.display());
    Ok(0)
}

fn solve(
    family: Family,
    gamma: Option<u32>,
    k: Option<u32>,
    out: &Path,
    cfg: &RunConfig,
) -> Result<u8> {
    let need = |v: Option<u32>, flag: &str| {
        v.ok_or_else(|| Error::Invalid(format!("--{flag} is required")))
    };
    let (s, residual) = match family {
        Family::Genus => solve_genus_family(need(gamma, "gamma")?)?,
        Family::Even => {
            let k = need(k, "k")?;
            let sol = solve_a(k, 1e-12)?;
            let s = Surface::even_family(k, sol.a)?;
            let r = closure_residual(&s)?;
            (s, r)
        }
        Family::Weber => {
            let g = need(gamma, "gamma")?;
            let sol = weber_solve(g, cfg.tol_period, None)?;
            (Surface::weber_family(g, sol.c, &sol.a)?, sol.residual)
        }
        Family::Catenoid => {
            let s = Surface::catenoid();
            let r = closure_residual(&s)?;
            (s, r)
        }
    };
    if !(residual <= cfg.tol_period) {
        return Err(Error::NoConvergence(format!(
            "period residual {residual:.3e} above {:.1e}",
            cfg.tol_period
        )));
    }
    write_params(&SolvedParams::from_surface(&s, residual), out)
}

fn load(params: Option<&Path>, builtin: Option<Builtin>) -> Result<Surface> {
    match (params, builtin) {
        (_, Some(Builtin::Catenoid)) => Ok(Surface::catenoid()),
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
            let p: SolvedParams = serde_json::from_str(&text)?;
            p.surface()
        }
        (None, None) => Err(Error::Invalid("give a parameter file or --builtin".into())),
    }
}

#[derive(Serialize)]
struct Checks {
    periods: bool,
    residues: bool,
    ends: bool,
    jorge_meeks: bool,
    total_curvature: bool,
    symmetry: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    params: SolvedParams,
    periods: PeriodReport,
    ends: EndReport,
    jorge_meeks: JorgeMeeks,
    total_curvature: TotalCurvature,
    group_order: usize,
    symmetries: Vec<SymmetryReport>,
    checks: Checks,
    pass: bool,
}

fn verify(s: &Surface, report: Option<&Path>, samples: usize, cfg: &RunConfig) -> Result<u8> {
    let periods = verify_periods(&s.curve, &s.data, &s.generators()?, cfg.tol_period)?;
    let ends = end_orders(&s.data, &s.curve)?;
    let deg = s.curve.degree(&s.data.g)?;
    let jm = jorge_meeks_check(s.genus(), &ends.d_profile(), deg);
    let tc = total_curvature(&s.data, &s.curve, 2)?;
    let imm = Immersion::new(s)?;
    let gens = family_symmetries(s)
        .iter()
        .map(|op| calibrate(&imm, op))
        .collect::<Result<Vec<_>>>()?;
    let group = symmetry_group(&gens)?;
    let symmetries = symmetry_check_many(&imm, &group, samples, cfg.seed)?;

    let period_ok = periods
        .cycles
        .iter()
        .all(|c| c.period1 <= cfg.tol_period && c.period2 <= cfg.tol_period);
    let checks = Checks {
        periods: period_ok,
        residues: periods
            .residues
            .iter()
            .all(|r| r.max_imag <= cfg.tol_period),
        ends: ends
            .ends
            .iter()
            .all(|e| e.residues.iter().all(|r| r[1].abs() <= cfg.tol_period)),
        jorge_meeks: jm.identity_holds && jm.consistent,
        total_curvature: tc.rel_error <= cfg.tol_curvature,
        symmetry: symmetries
            .iter()
            .all(|r| r.max_deviation <= cfg.tol_symmetry),
    };
    let pass = checks.periods
        && checks.residues
        && checks.ends
        && checks.jorge_meeks
        && checks.total_curvature
        && checks.symmetry;
    let residual = periods.max_residual;
    let out = VerifyReport {
        params: SolvedParams::from_surface(s, residual),
        periods,
        ends,
        jorge_meeks: jm,
        total_curvature: tc,
        group_order: group.len(),
        symmetries,
        checks,
        pass,
    };
    match report {
        Some(path) => {
            write_json(&out, path)?;
            let d = out.ends.d_profile();
            println!(
                "{}: residual {residual:.2e}, d = {d:?}, tau = {:.4} pi, group order {}: {}",
                s.family.name(),
                out.total_curvature.extrapolated / std::f64::consts::PI,
                out.group_order,
                if pass { "pass" } else { "FAIL" }
            );
        }
        None => print!("{}", to_json(&out)?),
    }
    Ok(if pass { 0 } else { 2 })
}

/// `mesh.obj` -> `mesh.meta.json`, so the sidecar never lands on a parameter file.
fn sidecar(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

fn mesh(s: &Surface, opts: &MeshOptions, out: &Path, ply: Option<&Path>) -> Result<u8> {
    let residual = closure_residual(s)?;
    let m = build_mesh(s, opts)?;
    export_obj(&m, out)?;
    if let Some(p) = ply {
        write_ply(&m, std::io::BufWriter::new(fs::File::create(p)?))?;
    }
    let tau = total_curvature(&s.data, &s.curve, 2)
        .ok()
        .map(|t| t.extrapolated / (4.0 * std::f64::consts::PI));
    let meta = MeshMetadata {
        family: s.family,
        param: s.param,
        c: s.c,
        a: s.a.clone(),
        closure_residual: residual,
        deg_g: s.curve.degree(&s.data.g)?,
        tau_over_4pi: tau,
        vertices: m.vertices.len(),
        faces: m.faces.len(),
        options: opts.clone(),
    };
    let side = sidecar(out);
    write_json(&meta, &side)?;
    println!(
        "{} vertices, {} faces, max edge {:.3e} -> {} ({})",
        m.vertices.len(),
        m.faces.len(),
        m.max_edge_length(),
        out.display(),
        side.display()
    );
    Ok(0)
}

fn classify(
    gamma: Option<u32>,
    max_gamma: Option<u32>,
    ends: Option<Vec<u32>>,
    json: Option<&Path>,
) -> Result<u8> {
    if gamma == Some(0) || max_gamma == Some(0) {
        return Err(Error::Invalid("genus must be at least 1".into()));
    }
    let top = gamma.or(max_gamma).unwrap_or(60);
    let selected: Vec<Table> = tables(top)?
        .into_iter()
        .map(|mut t| {
            if let Some(g) = gamma {
                t.rows.retain(|r| r.gamma == g);
            }
            t
        })
        .collect();
    for t in &selected {
        println!("{}", render_table(t));
    }
    let catalog = match (gamma, ends.as_deref()) {
        (_, Some(d)) if d.len() != 2 => {
            return Err(Error::Invalid(format!(
                "--ends takes two orders, got {d:?}"
            )));
        }
        (Some(g), Some([d1, d2])) => {
            let c = candidate_catalog(g, (*d1, *d2))?;
            for cand in &c {
                let status = serde_json::to_value(cand.status)?;
                let status = status.as_str().unwrap_or_default();
                println!(
                    "{} | g = {} | eta = {} | {status}: {}",
                    cand.curve, cand.g, cand.eta, cand.reason
                );
            }
            Some(c)
        }
        _ => None,
    };
    if let Some(path) = json {
        write_json(
            &serde_json::json!({ "tables": selected, "candidates": catalog }),
            path,
        )?;
    }
    Ok(0)
}

fn nonexist(case: Option<&str>, json: Option<&Path>) -> Result<u8> {
    let cases = match case {
        Some(name) => vec![NonexistenceCase::parse(name)?],
        None => NonexistenceCase::ALL.to_vec(),
    };
    let mut reports = vec![];
    for c in cases {
        let r = nonexistence_report(c, &c.default_grid())?;
        let hits = r.samples.iter().filter(|s| s.obstructed).count();
        print!(
            "{}: obstructed at {hits}/{} points",
            c.name(),
            r.samples.len()
        );
        if let Some(cov) = &r.coverage {
            print!(
                ", bounds cover [{}, 0) and (-inf, {:.6}], overlap [{:.6}, {:.6}]",
                cov.claim1_from, cov.claim2_to, cov.overlap.0, cov.overlap.1
            );
        }
        println!(
            ": {}",
            if r.obstructed {
                "confirmed"
            } else {
                "NOT confirmed"
            }
        );
        reports.push(r);
    }
    if let Some(path) = json {
        write_json(&reports, path)?;
    }
    Ok(if reports.iter().all(|r| r.obstructed) {
        0
    } else {
        2
    })
}
