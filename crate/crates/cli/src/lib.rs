//! Command-line front end for Reidemeister numbers and spectra.
//!
//! Groups are given either as cyclic orders (`4,8,3`) or as a p-group type
//! (`p=2 e=2,3`); matrices as rows separated by `;`, entries by `,`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use reidemeister_core::decomposition::{abc_decompose, decompose_exponents, BlockDecomposition};
use reidemeister_core::oracle::{endomorphism_count, verify_cell, CellReport};
use reidemeister_core::spectra::{
    abelian_groups_of_order, partitions, product_number, reidemeister_witness, spec_p,
    spec_r_abelian, spec_r_pgroup, witness, witness_abelian,
};
use reidemeister_core::{
    AbelianGroupType, EndoMatrix, EnumBudget, Error, Factored, IntMatrix, PGroupType, Spectrum,
};
use serde_json::{json, Map, Value};

/// Failure of a command, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("invalid group: {0}")]
    InvalidType(String),
    #[error("{0}")]
    OutOfSpectrum(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("cannot write {path}: {source}")]
    Unwritable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("verification failed for {0} cell(s)")]
    VerifyFailed(usize),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) | CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::InvalidType(_) => 3,
            CliError::OutOfSpectrum(_) => 4,
            CliError::InvalidMatrix(_) => 5,
            CliError::Unwritable { .. } => 6,
        }
    }
}

/// Sorts a core error into a group, spectrum or matrix complaint.
fn classify(e: Error) -> CliError {
    match e {
        Error::Parse(s) => CliError::Parse(s),
        Error::NotPrime(_)
        | Error::NonPositiveExponent
        | Error::InvalidOrder(_)
        | Error::WrongPrime { .. } => CliError::InvalidType(e.to_string()),
        Error::OutOfSpectrum(s) => CliError::OutOfSpectrum(s),
        other => CliError::InvalidMatrix(other.to_string()),
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "reidemeister",
    version,
    about = "Reidemeister numbers and spectra of finite abelian groups"
)]
pub struct Cli {
    /// Emit JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reidemeister spectrum of a finite abelian group.
    Spectrum {
        /// `4,8,3` or `p=2 e=2,3`
        #[arg(required = true, num_args = 1..)]
        group: Vec<String>,
        /// Attach an automorphism realising each value.
        #[arg(long)]
        witnesses: bool,
    },
    /// Spectrum of product numbers of a p-group.
    PiSpectrum {
        #[arg(required = true, num_args = 1..)]
        group: Vec<String>,
        #[arg(long)]
        witnesses: bool,
    },
    /// abc-decomposition, depth vector d(e) and Σ(e) of an exponent vector.
    Decompose {
        /// `e=1,2,3`, optionally with `p=<prime>`
        #[arg(required = true, num_args = 1..)]
        group: Vec<String>,
    },
    /// An automorphism with product number p^m.
    Witness {
        #[arg(required = true, num_args = 1..)]
        group: Vec<String>,
        #[arg(short = 'm', allow_negative_numbers = true)]
        m: i64,
    },
    /// Reidemeister number of an endomorphism.
    Reidemeister {
        #[arg(required = true, num_args = 1..)]
        group: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// Product number of an automorphism.
    Pi {
        #[arg(required = true, num_args = 1..)]
        group: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// Compare closed forms against exhaustive enumeration.
    Verify {
        /// Primes to sweep (repeatable); defaults to 2, 3 and 5.
        #[arg(short = 'p')]
        primes: Vec<u64>,
        /// A single exponent vector instead of every type within budget.
        #[arg(short = 'e')]
        exponents: Option<String>,
        #[arg(long)]
        max_endos: Option<u64>,
        #[arg(long)]
        max_group_order: Option<u64>,
        /// Also count fixed points element by element and twisted classes
        /// for every endomorphism.
        #[arg(long)]
        brute: bool,
    },
    /// Write the spectra of every abelian group up to a given order as JSON.
    Atlas {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_order: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        witnesses: bool,
    },
}

/// A parsed group argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    PGroup(PGroupType),
    Abelian(AbelianGroupType),
}

impl GroupSpec {
    /// `p=<prime> e=<list>` or comma-separated cyclic orders.
    pub fn parse(words: &[String]) -> CliResult<Self> {
        let text = words.join(" ");
        if text.contains('=') {
            text.parse::<PGroupType>()
                .map(GroupSpec::PGroup)
                .map_err(classify)
        } else {
            let compact: String = text.split_whitespace().collect();
            compact
                .parse::<AbelianGroupType>()
                .map(GroupSpec::Abelian)
                .map_err(classify)
        }
    }

    /// The group as a single p-group, if it is one.
    fn into_pgroup(self) -> CliResult<PGroupType> {
        match self {
            GroupSpec::PGroup(g) => Ok(g),
            GroupSpec::Abelian(a) => {
                let mut comps = a.sylow_components();
                match comps.len() {
                    1 => Ok(comps.pop_first().expect("one component").1),
                    _ => Err(CliError::InvalidType(format!(
                        "{a} is not a group of prime-power order; use p=<prime> e=<exponents>"
                    ))),
                }
            }
        }
    }
}

/// Decimal digits beyond which values also show their factorization.
const PLAIN_DIGITS: usize = 9;

/// `12`, or `1267650600228229401496703205376=2^100` once the decimal is long.
pub fn render_value(v: &Factored) -> String {
    let dec = v.to_biguint().to_string();
    if dec.len() > PLAIN_DIGITS {
        format!("{dec}={v}")
    } else {
        dec
    }
}

/// `4 = 2^2`, with plain `1` for the empty product.
pub fn render_factored(v: &Factored) -> String {
    if v.is_one() {
        "1".to_string()
    } else {
        format!("{} = {v}", v.to_biguint())
    }
}

pub fn value_json(v: &Factored) -> Value {
    let factors: Map<String, Value> = v
        .factors()
        .iter()
        .map(|(p, k)| (p.to_string(), json!(k)))
        .collect();
    json!({"decimal": v.to_biguint().to_string(), "factorization": factors})
}

fn pgroup_json(g: &PGroupType) -> Value {
    json!({"p": g.p(), "e": g.exponents(), "order": g.order().to_biguint().to_string()})
}

pub fn abelian_json(a: &AbelianGroupType) -> Value {
    let sylow: Map<String, Value> = a
        .sylow_components()
        .iter()
        .map(|(p, g)| (p.to_string(), json!(g.exponents())))
        .collect();
    json!({
        "order": a.order().to_biguint().to_string(),
        "cyclic_orders": a.cyclic_orders(),
        "sylow": sylow,
    })
}

fn group_json(spec: &GroupSpec) -> Value {
    match spec {
        GroupSpec::PGroup(g) => pgroup_json(g),
        GroupSpec::Abelian(a) => abelian_json(a),
    }
}

pub fn decomposition_json(dec: &BlockDecomposition) -> Value {
    let blocks: Vec<Value> = dec
        .blocks()
        .iter()
        .map(|b| json!({"kind": b.kind.to_string(), "values": b.values}))
        .collect();
    json!({
        "bracketing": dec.to_string(),
        "blocks": blocks,
        "a": dec.a(),
        "b": dec.b(),
        "c": dec.c(),
        "d": dec.d(),
        "sigma": dec.exponents().iter().map(|&x| u64::from(x)).sum::<u64>(),
    })
}

/// Per-prime witness matrices, keyed by prime.
type Witnesses = BTreeMap<u64, EndoMatrix>;

fn witnesses_json(ws: &Witnesses) -> Value {
    let map: Map<String, Value> = ws
        .iter()
        .map(|(p, w)| (p.to_string(), json!(w.matrix().to_string())))
        .collect();
    Value::Object(map)
}

fn witnesses_text(ws: &Witnesses) -> String {
    ws.iter()
        .map(|(p, w)| format!("p={p}:{}", w.matrix()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn spectrum_witnesses(spec: &GroupSpec, s: &Spectrum, use_pi: bool) -> CliResult<Vec<Witnesses>> {
    s.values()
        .map(|v| -> CliResult<Witnesses> {
            match spec {
                GroupSpec::Abelian(a) if !use_pi => witness_abelian(a, v).map_err(classify),
                _ => {
                    let g = spec.clone().into_pgroup()?;
                    let m = v.valuation(g.p());
                    let w = if use_pi {
                        witness(&g, m)
                    } else {
                        reidemeister_witness(&g, m)
                    }
                    .map_err(classify)?;
                    Ok(BTreeMap::from([(g.p(), w)]))
                }
            }
        })
        .collect()
}

fn write_json(out: &mut dyn Write, v: &Value) -> CliResult {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("serialisable")
    )?;
    Ok(())
}

fn emit_spectrum(
    out: &mut dyn Write,
    json: bool,
    spec: &GroupSpec,
    s: &Spectrum,
    ws: Option<Vec<Witnesses>>,
) -> CliResult {
    if json {
        let values: Vec<Value> = s
            .values()
            .enumerate()
            .map(|(i, v)| {
                let mut entry = value_json(v);
                if let Some(ws) = &ws {
                    entry["witness"] = witnesses_json(&ws[i]);
                }
                entry
            })
            .collect();
        return write_json(out, &json!({"group": group_json(spec), "values": values}));
    }
    match ws {
        None => {
            let line: Vec<String> = s.values().map(render_value).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Some(ws) => {
            for (v, w) in s.values().zip(&ws) {
                writeln!(out, "{} {}", render_value(v), witnesses_text(w))?;
            }
        }
    }
    Ok(())
}

fn parse_matrix(g: &PGroupType, text: &str) -> CliResult<EndoMatrix> {
    let m: IntMatrix = text.parse().map_err(classify)?;
    EndoMatrix::new(g, m).map_err(|e| CliError::InvalidMatrix(e.to_string()))
}

fn emit_number(out: &mut dyn Write, json: bool, v: &Factored) -> CliResult {
    if json {
        write_json(out, &value_json(v))
    } else {
        writeln!(out, "{}", render_factored(v))?;
        Ok(())
    }
}

/// Every type of prime `p` whose endomorphism ring fits in `max_endos`.
fn types_within(p: u64, max_endos: u64) -> Vec<PGroupType> {
    let mut sum = 0u32;
    let mut out = Vec::new();
    while p.checked_pow(sum).is_some_and(|q| q <= max_endos) {
        for e in partitions(sum) {
            let g = PGroupType::new(p, e).expect("p checked prime");
            if endomorphism_count(&g).is_some_and(|c| c <= max_endos) {
                out.push(g);
            }
        }
        sum += 1;
    }
    out
}

fn cell_json(r: &CellReport) -> Value {
    let values =
        |s: &Spectrum| -> Vec<String> { s.values().map(|v| v.to_biguint().to_string()).collect() };
    json!({
        "group": pgroup_json(&r.group),
        "pass": r.passes(),
        "endomorphisms": r.endomorphisms,
        "automorphisms": r.automorphisms,
        "oracle_r": values(&r.oracle_r),
        "closed_r": values(&r.closed_r),
        "oracle_pi": values(&r.oracle_pi),
        "closed_pi": values(&r.closed_pi),
        "bound_violations": r.bound_violations,
        "lower_attained": r.lower_attained,
        "upper_attained": r.upper_attained,
        "restrict_failures": r.restrict_failures,
        "column_failures": r.column_failures,
        "brute_mismatches": r.brute_mismatches,
    })
}

/// One atlas record.
pub fn atlas_entry(a: &AbelianGroupType, with_witnesses: bool) -> CliResult<Value> {
    let spectrum = spec_r_abelian(a);
    let sylow2 = a.sylow_components().remove(&2);
    let mut entry = json!({
        "group": abelian_json(a),
        "spectrum": spectrum.values().map(value_json).collect::<Vec<_>>(),
        "sylow2_blocks": sylow2.as_ref().map(|g| decomposition_json(&abc_decompose(g))),
    });
    if with_witnesses {
        let spec = GroupSpec::Abelian(a.clone());
        let ws = spectrum_witnesses(&spec, &spectrum, false)?;
        let map: Map<String, Value> = spectrum
            .values()
            .zip(&ws)
            .map(|(v, w)| (v.to_biguint().to_string(), witnesses_json(w)))
            .collect();
        entry["witnesses"] = Value::Object(map);
    }
    Ok(entry)
}

/// Every abelian group of order at most `max_order`, by order then type.
pub fn atlas_groups(max_order: u64) -> Vec<AbelianGroupType> {
    (2..=max_order).flat_map(abelian_groups_of_order).collect()
}

/// The atlas document: pretty JSON with a trailing newline.
pub fn render_atlas(max_order: u64, with_witnesses: bool) -> CliResult<String> {
    let entries = atlas_groups(max_order)
        .par_iter()
        .map(|a| atlas_entry(a, with_witnesses))
        .collect::<CliResult<Vec<Value>>>()?;
    Ok(serde_json::to_string_pretty(&Value::Array(entries)).expect("serialisable") + "\n")
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    std::fs::write(path, contents).map_err(|source| CliError::Unwritable {
        path: path.to_path_buf(),
        source,
    })
}

/// The budget from `REIDEMEISTER_BUDGET`, with command-line overrides.
fn budget(max_endos: Option<u64>, max_group_order: Option<u64>) -> CliResult<EnumBudget> {
    let base = EnumBudget::from_env().map_err(classify)?;
    EnumBudget::new(
        max_endos.unwrap_or(base.max_endos),
        max_group_order.unwrap_or(base.max_group_order),
    )
    .map_err(classify)
}

/// Runs one command, writing its normal output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> CliResult {
    let json = cli.json;
    match cli.command {
        Command::Spectrum { group, witnesses } => {
            let spec = GroupSpec::parse(&group)?;
            let s = match &spec {
                GroupSpec::PGroup(g) => spec_r_pgroup(g),
                GroupSpec::Abelian(a) => spec_r_abelian(a),
            };
            let ws = witnesses
                .then(|| spectrum_witnesses(&spec, &s, false))
                .transpose()?;
            emit_spectrum(out, json, &spec, &s, ws)
        }
        Command::PiSpectrum { group, witnesses } => {
            let spec = GroupSpec::parse(&group)?;
            let g = spec.clone().into_pgroup()?;
            let s = spec_p(&g);
            let ws = witnesses
                .then(|| spectrum_witnesses(&spec, &s, true))
                .transpose()?;
            emit_spectrum(out, json, &spec, &s, ws)
        }
        Command::Decompose { group } => {
            let text = group.join(" ");
            let dec = if text.contains("p=") {
                abc_decompose(&text.parse::<PGroupType>().map_err(classify)?)
            } else {
                let list = text.trim().strip_prefix("e=").unwrap_or(text.trim());
                let e = reidemeister_core::endo::parse_exponents(list).map_err(classify)?;
                if e.contains(&0) {
                    return Err(classify(Error::NonPositiveExponent));
                }
                let mut e = e;
                e.sort_unstable();
                decompose_exponents(&e)
            };
            if json {
                return write_json(out, &decomposition_json(&dec));
            }
            let d: Vec<String> = dec.d().iter().map(ToString::to_string).collect();
            let sigma: u64 = dec.exponents().iter().map(|&x| u64::from(x)).sum();
            writeln!(
                out,
                "{dec} a={} b={} c={} d={} sigma={sigma}",
                dec.a(),
                dec.b(),
                dec.c(),
                d.join(",")
            )?;
            Ok(())
        }
        Command::Witness { group, m } => {
            let g = GroupSpec::parse(&group)?.into_pgroup()?;
            let lo = abc_decompose(&g).lower_exponent();
            let m = u64::try_from(m).map_err(|_| {
                CliError::OutOfSpectrum(format!(
                    "exponent {m} outside [{lo}, {}]",
                    g.total_exponent()
                ))
            })?;
            let w = witness(&g, m).map_err(classify)?;
            // re-validate from the printed form
            let back = parse_matrix(&g, &w.matrix().to_string())?;
            let pi = product_number(&back).map_err(classify)?;
            let r = back.reidemeister_number();
            if json {
                return write_json(
                    out,
                    &json!({
                        "group": pgroup_json(&g),
                        "matrix": back.matrix().to_string(),
                        "pi": value_json(&pi),
                        "r": value_json(&r),
                    }),
                );
            }
            writeln!(out, "{}", back.matrix())?;
            writeln!(out, "Pi={} R={}", render_value(&pi), render_value(&r))?;
            Ok(())
        }
        Command::Reidemeister { group, matrix } => {
            let g = GroupSpec::parse(&group)?.into_pgroup()?;
            let em = parse_matrix(&g, &matrix)?;
            emit_number(out, json, &em.reidemeister_number())
        }
        Command::Pi { group, matrix } => {
            let g = GroupSpec::parse(&group)?.into_pgroup()?;
            let em = parse_matrix(&g, &matrix)?;
            let pi = product_number(&em).map_err(|e| CliError::InvalidMatrix(e.to_string()))?;
            emit_number(out, json, &pi)
        }
        Command::Verify {
            primes,
            exponents,
            max_endos,
            max_group_order,
            brute,
        } => {
            let budget = budget(max_endos, max_group_order)?;
            let primes = if primes.is_empty() {
                vec![2, 3, 5]
            } else {
                primes
            };
            let mut cells = Vec::new();
            for &p in &primes {
                match &exponents {
                    Some(list) => {
                        let e = reidemeister_core::endo::parse_exponents(list).map_err(classify)?;
                        cells.push(PGroupType::new(p, e).map_err(classify)?);
                    }
                    None => {
                        PGroupType::trivial(p).map_err(classify)?;
                        cells.extend(types_within(p, budget.max_endos));
                    }
                }
            }
            let mut reports = Vec::new();
            let mut skipped = Vec::new();
            for g in &cells {
                match verify_cell(g, &budget, brute) {
                    Ok(r) => {
                        if !json {
                            writeln!(out, "{r}")?;
                        }
                        reports.push(r);
                    }
                    Err(Error::BudgetExceeded(why)) => {
                        if !json {
                            writeln!(out, "SKIP {g} {why}")?;
                        }
                        skipped.push((g.clone(), why));
                    }
                    Err(e) => return Err(classify(e)),
                }
            }
            let failed = reports.iter().filter(|r| !r.passes()).count();
            if json {
                write_json(
                    out,
                    &json!({
                        "cells": reports.iter().map(cell_json).collect::<Vec<_>>(),
                        "skipped": skipped.iter().map(|(g, why)| json!({"group": pgroup_json(g), "reason": why})).collect::<Vec<_>>(),
                        "passed": reports.len() - failed,
                        "failed": failed,
                    }),
                )?;
            } else {
                writeln!(
                    out,
                    "cells={} passed={} failed={failed} skipped={}",
                    reports.len() + skipped.len(),
                    reports.len() - failed,
                    skipped.len()
                )?;
            }
            if failed > 0 {
                return Err(CliError::VerifyFailed(failed));
            }
            Ok(())
        }
        Command::Atlas {
            max_order,
            out: path,
            witnesses,
        } => {
            let doc = render_atlas(max_order, witnesses)?;
            write_file(&path, &doc)?;
            let count = atlas_groups(max_order).len();
            if json {
                write_json(
                    out,
                    &json!({"path": path.display().to_string(), "groups": count}),
                )
            } else {
                writeln!(out, "wrote {count} groups to {}", path.display())?;
                Ok(())
            }
        }
    }
}
