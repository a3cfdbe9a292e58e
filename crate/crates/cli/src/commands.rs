use std::fs;
use std::path::Path;

use valstrat::chains::{
    check_classical_mostowski, check_valuative_mostowski, minimal_third_constant, ChainConstants, ChainFile,
    Classification, ResolvedChain, ValChain,
};
use valstrat::flags::{build_flags, lemma_flags_conclusions, lemma_hypothesis_holds, verify_flag_family, FlagBuild, FlagFamily};
use valstrat::grassmann::{delta, Subspace};
use valstrat::rectify::{check_chain_lifts, check_derivative_gap, check_flat_offsets, SedationInput, StrataSeq};
use valstrat::strat::{load_catalog, CatalogEntry, NamedChain};
use valstrat::suites;
use valstrat::verdict::{Status, Verdict};
use valstrat::{Error, FieldElement, Result};

use crate::report::{Report, Section};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn tuple<T: ToString>(xs: &[T]) -> String {
    format!("({})", xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn points_line(points: &[Vec<FieldElement>], dims: &[usize]) -> String {
    let ps: Vec<String> = points.iter().map(|p| tuple(p)).collect();
    format!("points: ({})  dims: {}", ps.join(", "), tuple(dims))
}

fn chain_info(s: &mut Section, ch: &ValChain) {
    s.info(format!("kind: {}", ch.kind));
    s.info(format!("lambdas: {}", tuple(&ch.lambdas)));
}

pub fn delta_cmd(w1: &str, w2: &str) -> Result<Report> {
    let (a, b): (Subspace, Subspace) = (w1.parse()?, w2.parse()?);
    let d = delta(&a, &b)?;
    let mut s = Section::default();
    s.info(format!("delta: {d}"));
    Ok(Report {
        json: Some(serde_json::json!({ "delta": d.to_string() })),
        ..Report::single(s)
    })
}

/// Classification as a verdict, plus the chain when there is one.
fn classify(r: &ResolvedChain, s: &mut Section) -> Result<Option<ValChain>> {
    s.info(points_line(&r.points, &r.dims));
    Ok(match r.classify()? {
        Classification::Chain(ch) => {
            chain_info(s, &ch);
            s.verdict(Verdict::new("valchain", Status::Holds));
            Some(ch)
        }
        Classification::Invalid(why) => {
            s.verdict(Verdict::new("valchain", Status::Fails).with_note(why));
            None
        }
    })
}

pub fn check_valchain(path: &Path) -> Result<Report> {
    let r = ChainFile::from_json(&read(path)?)?.resolve()?;
    let mut s = Section::default();
    classify(&r, &mut s)?;
    Ok(Report::single(s))
}

pub fn check_vm(path: &Path) -> Result<Report> {
    let r = ChainFile::from_json(&read(path)?)?.resolve()?;
    let mut s = Section::default();
    s.info(points_line(&r.points, &r.dims));
    match r.classify()? {
        Classification::Chain(ch) => {
            chain_info(&mut s, &ch);
            s.verdict(check_valuative_mostowski(&ch, &r.strat)?.verdict());
        }
        Classification::Invalid(why) => {
            let label = if r.dims.len() >= 2 && r.dims[0] == r.dims[1] { "vm2" } else { "vm1" };
            s.verdict(Verdict::new(label, Status::Vacuous).with_note(format!("not a val-chain: {why}")));
        }
    }
    Ok(Report::single(s))
}

pub fn check_classical(path: &Path, constants: &str) -> Result<Report> {
    let r = ChainFile::from_json(&read(path)?)?.resolve()?;
    let k: ChainConstants = constants.parse()?;
    let mut s = Section::default();
    s.info(points_line(&r.points, &r.dims));
    s.info(format!("constants: {k}"));
    let out = check_classical_mostowski(&r.points, &r.dims, &k, &r.strat)?;
    s.verdict(out.verdict);
    Ok(Report::single(s))
}

fn flag_verdicts(f: &FlagFamily, s: &mut Section) {
    s.verdicts.extend(verify_flag_family(f));
    if !lemma_hypothesis_holds(f) {
        s.verdict(Verdict::new("flags1", Status::Vacuous).with_note("hypothesis fails"));
        return;
    }
    let c = lemma_flags_conclusions(f);
    s.verdict(c.flags1.verdict());
    if let Some(f2) = c.flags2 {
        s.verdict(f2.verdict());
    }
}

fn chain_flags(ch: &ValChain, r: &ResolvedChain, s: &mut Section) -> Result<()> {
    match build_flags(ch, &r.strat)? {
        FlagBuild::Family(f) => flag_verdicts(&f, s),
        FlagBuild::RankDrop(d) => s.verdict(
            Verdict::new(format!("rank({},{})", d.k, d.l), Status::Fails).with_sides(d.rank, d.expected),
        ),
    }
    Ok(())
}

/// A flag family file, or a chain file whose flags are built first.
pub fn check_flags(path: &Path) -> Result<Report> {
    let src = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&src)?;
    let mut s = Section::default();
    if value.get("rows").is_some() {
        let f = FlagFamily::from_json(&src)?;
        s.info(format!("lambdas: {}", tuple(&f.lambdas)));
        flag_verdicts(&f, &mut s);
    } else {
        let r = ChainFile::from_json(&src)?.resolve()?;
        if let Some(ch) = classify(&r, &mut s)? {
            chain_flags(&ch, &r, &mut s)?;
        }
    }
    Ok(Report::single(s))
}

pub fn check_sedated(path: &Path) -> Result<Report> {
    let input = SedationInput::from_json(&read(path)?)?;
    let mut s = Section::default();
    s.info(format!("version: {}", input.version));
    s.verdicts = input.run()?;
    Ok(Report::single(s))
}

fn demo_chain(entry: &CatalogEntry, c: &NamedChain) -> Result<Section> {
    let mut s = Section::titled(&c.name);
    let r = ResolvedChain {
        strat: entry.strat.clone(),
        points: c.points.clone(),
        dims: c.dims.clone(),
        kind_hint: "auto".into(),
    };
    let Some(ch) = classify(&r, &mut s)? else {
        return Ok(s);
    };
    s.verdict(check_valuative_mostowski(&ch, &r.strat)?.verdict());
    match minimal_third_constant(&r.points, &r.dims, &r.strat) {
        Ok((k, v)) => s.info(format!("minimal C'''^2: {k} (valuation {v})")),
        Err(e) => s.info(format!("minimal C'''^2: unavailable ({e})")),
    }
    chain_flags(&ch, &r, &mut s)?;
    // Rectilinearization checks along graph strata.
    if let Ok(seq) = StrataSeq::from_chain(&r.strat, &r.points, &r.dims) {
        s.verdicts.extend(check_chain_lifts(&seq, &ch)?);
        s.verdicts.extend(check_flat_offsets(&seq, &ch)?);
        if seq.m() >= 1 && seq.dim(0) == seq.dim(1) {
            s.verdicts.extend(check_derivative_gap(&seq, &ch)?);
        }
    }
    Ok(s)
}

pub fn demo(name: &str) -> Result<Report> {
    let entry = load_catalog(name)?;
    let mut head = Section::titled(format!("catalog {name}"));
    head.info(format!("ambient dimension: {}", entry.strat.ambient));
    head.info(format!(
        "valuative Lipschitz: {}",
        if entry.valuative_lipschitz { "yes" } else { "no" }
    ));
    let mut sections = vec![head];
    for c in &entry.chains {
        sections.push(demo_chain(&entry, c)?);
    }
    Ok(Report {
        sections,
        ..Default::default()
    })
}

pub fn selftest() -> Report {
    let all: Vec<Verdict> = suites::selftest().iter().map(suites::SuiteReport::verdict).collect();
    let failed: Vec<Verdict> = all.iter().filter(|v| !v.status.is_ok()).cloned().collect();
    let footer = if failed.is_empty() { "OK" } else { "FAILED" };
    // Text mode shows only failures; the suites are listed in JSON.
    let shown = Section {
        verdicts: failed,
        ..Default::default()
    };
    Report {
        json: Some(serde_json::to_value(&all).expect("serializable")),
        footer: Some(footer.into()),
        ..Report::single(shown)
    }
}
