use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chainmetric::chains::{ChainGraph, EpsSchedule};
use chainmetric::ext::format_f64;
use chainmetric::length::{path_length, polyline_length, predicate_for, PolylinePath};
use chainmetric::spaces::{parse_number, SpaceSpec};
use chainmetric::tower::{ChainTower, DEFAULT_ENTRY_CAP};
use chainmetric::verify::{self, Preset, VerifyConfig};
use chainmetric::{Error, FiniteMetricSpace, PointId, Result};

pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("CHAINMETRIC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "CHAINMETRIC_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn key_values(params: &[String]) -> Result<Vec<(String, String)>> {
    params
        .iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got `{p}`")))
        })
        .collect()
}

/// `"y-spider k=64 h=1/512"` (commas also separate parameters).
fn parse_spec(text: &str) -> Result<SpaceSpec> {
    let mut tokens = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty());
    let generator = tokens
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty space spec".into()))?;
    let params: Vec<String> = tokens.map(str::to_string).collect();
    SpaceSpec::parse(generator, &key_values(&params)?)
}

/// A space file path, or an inline generator spec when no such file exists.
fn load_space(arg: &str) -> Result<FiniteMetricSpace> {
    let path = Path::new(arg);
    if path.exists() {
        return FiniteMetricSpace::load(path);
    }
    if arg.contains('=') {
        return parse_spec(arg)?.build();
    }
    Err(Error::InvalidParameter(format!(
        "no space file `{arg}` (inline specs look like \"y-spider k=64 h=1/512\")"
    )))
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_number)
        .collect()
}

fn parse_pair(space: &FiniteMetricSpace, text: &str) -> Result<(PointId, PointId)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| Error::InvalidParameter(format!("expected a pair a,b, got `{text}`")))?;
    Ok((space.resolve(a.trim())?, space.resolve(b.trim())?))
}

fn graph<'a>(space: &'a FiniteMetricSpace, eps: f64, constrained: bool) -> Result<ChainGraph<'a>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if !constrained {
        return Ok(ChainGraph::new(space, eps));
    }
    let pred = predicate_for(space).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "{} has no admissibility predicate",
            space.generator
        ))
    })?;
    Ok(ChainGraph::constrained(space, eps, pred))
}

pub fn gen(generator: &str, params: &[String], out: &Path) -> Result<ExitCode> {
    let spec = SpaceSpec::parse(generator, &key_values(params)?)?;
    let space = spec.build()?;
    space.save(out)?;
    println!(
        "{}: {} points, resolution {}",
        spec.name(),
        space.len(),
        format_f64(space.resolution)
    );
    Ok(ExitCode::SUCCESS)
}

pub fn chain(
    space: &str,
    eps: &str,
    pair: Option<(&str, &str)>,
    constrained: bool,
    out: Option<&Path>,
    witness: bool,
) -> Result<ExitCode> {
    if pair.is_none() && out.is_none() {
        return Err(Error::InvalidParameter(
            "give --source and --target, or --out for all pairs".into(),
        ));
    }
    let space = load_space(space)?;
    let g = graph(&space, parse_number(eps)?, constrained)?;
    if let Some((a, b)) = pair {
        let (s, t) = (space.resolve(a)?, space.resolve(b)?);
        if witness {
            match g.minimizing_chain(s, t) {
                Ok(c) => {
                    println!("{}", format_f64(c.length.value()));
                    println!("{}", serde_json::to_string(&c.points)?);
                }
                Err(Error::Unreachable { .. }) => println!("{}", format_f64(f64::INFINITY)),
                Err(e) => return Err(e),
            }
        } else {
            println!("{}", format_f64(g.distance(s, t)));
        }
    }
    if let Some(path) = out {
        let m = g.matrix()?;
        let w = BufWriter::new(File::create(path)?);
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        {
            m.write_csv(w)?;
        } else {
            m.write_dmx(w)?;
        }
        eprintln!(
            "wrote {} x {} matrix to {}",
            m.len(),
            m.len(),
            path.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

pub fn d0(
    space: &str,
    pair: &str,
    schedule: &str,
    rtol: f64,
    constrained: bool,
    json: bool,
) -> Result<ExitCode> {
    let space = load_space(space)?;
    let (s, t) = parse_pair(&space, pair)?;
    let schedule = EpsSchedule::new(
        parse_list(schedule)?,
        chainmetric::chains::eps_floor(&space),
    )?;
    let pred = if constrained {
        Some(predicate_for(&space).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "{} has no admissibility predicate",
                space.generator
            ))
        })?)
    } else {
        None
    };
    let report = chainmetric::chains::estimate_pair(&space, s, t, &schedule, rtol, pred.as_ref())?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for (eps, est) in report.schedule.iter().zip(&report.estimates) {
            println!("{} {}", format_f64(*eps), format_f64(est.value()));
        }
        println!("final {}", format_f64(report.final_estimate.value()));
        println!("converged {}", report.converged);
        if report.monotone.iter().any(|&m| !m) {
            println!("warning: estimates decreased along the schedule");
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn iterate(space: &str, levels: &str, pair: &str, nested: bool) -> Result<ExitCode> {
    let space = load_space(space)?;
    let (s, t) = parse_pair(&space, pair)?;
    let eps = parse_list(levels)?;
    let tower = if nested {
        ChainTower::nested(&space, &eps, DEFAULT_ENTRY_CAP)?
    } else {
        ChainTower::new(&space, &eps)?
    };
    println!("level 0 {}", format_f64(space.dist(s, t)));
    for level in 1..=tower.levels() {
        println!(
            "level {level} {} eps {}",
            format_f64(tower.distance(level, s, t)),
            format_f64(eps[level - 1])
        );
    }
    Ok(ExitCode::SUCCESS)
}

pub fn length(path: &Path) -> Result<ExitCode> {
    let file: PolylinePath = serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?;
    let len = match file {
        PolylinePath::InSpace { space, ids } => {
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            let space_path: PathBuf = base.join(space);
            path_length(&FiniteMetricSpace::load(&space_path)?, &ids)?
        }
        PolylinePath::Free { metric, vertices } => polyline_length(&vertices, metric)?,
    };
    println!("{}", format_f64(len.value()));
    Ok(ExitCode::SUCCESS)
}

pub fn waypoints(
    space: &str,
    eps: &str,
    pair: &str,
    delta: &str,
    constrained: bool,
    json: bool,
) -> Result<ExitCode> {
    let space = load_space(space)?;
    let (s, t) = parse_pair(&space, pair)?;
    let g = graph(&space, parse_number(eps)?, constrained)?;
    let w = g.waypoints(s, t, parse_number(delta)?)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&w)?);
        return Ok(ExitCode::SUCCESS);
    }
    println!("total {}", format_f64(w.total));
    for (i, (id, arc)) in w.waypoints.iter().zip(&w.arc_positions).enumerate() {
        println!(
            "w{} {id} arc {} leg {}",
            i + 1,
            format_f64(*arc),
            format_f64(w.legs[i])
        );
    }
    println!(
        "final leg {}",
        format_f64(*w.legs.last().expect("final leg"))
    );
    println!(
        "residual {} bound {}",
        format_f64(w.residual),
        format_f64(w.residual_bound)
    );
    Ok(ExitCode::SUCCESS)
}

pub fn verify(preset: &str, out: Option<&Path>, only: Option<&str>) -> Result<ExitCode> {
    let mut config = VerifyConfig::new(preset.parse::<Preset>()?);
    if let Some(only) = only {
        config.only = only
            .split(',')
            .map(|c| {
                c.trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("not a criterion number: `{c}`")))
            })
            .collect::<Result<_>>()?;
    }
    let report = verify::run_verify_suite(&config)?;
    print!("{}", report.table());
    if let Some(path) = out {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{}", report.to_json()?)?;
    }
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn sweep(
    spec: &str,
    eps_grid: &str,
    h_grid: &str,
    pair: &str,
    constrained: bool,
    csv: &Path,
) -> Result<ExitCode> {
    let spec = parse_spec(spec)?;
    let (a, b) = pair
        .split_once(',')
        .ok_or_else(|| Error::InvalidParameter(format!("expected a pair a,b, got `{pair}`")))?;
    let rows = verify::sweep(
        &spec,
        &parse_list(eps_grid)?,
        &parse_list(h_grid)?,
        (a.trim(), b.trim()),
        constrained,
    )?;
    verify::write_sweep_csv(&rows, BufWriter::new(File::create(csv)?))?;
    for r in &rows {
        println!(
            "h {} eps {} estimate {}",
            format_f64(r.h),
            format_f64(r.eps),
            format_f64(r.estimate.value())
        );
    }
    if !verify::sweep_is_monotone(&rows) {
        eprintln!("warning: estimates decreased as eps decreased");
    }
    Ok(ExitCode::SUCCESS)
}
