//! `moments`, `recurrence` and `pvi` subcommands.

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use lhpvi_core::mobius::closed_form_ladder;
use lhpvi_core::numerics::{to_decimal, Jet2, PrecisionContext};
use lhpvi_core::painleve::{hamilton_p_residual, hamilton_residual, pvi_residual_with, pvi_state, pvi_state_derived};
use lhpvi_core::weights::cache::MomentDoc;
use lhpvi_core::weights::{MomentCache, WeightParams};
use lhpvi_core::Error;

use crate::config::{CorruptSpec, Format, RunConfig};
use crate::report::SCHEMA_VERSION;
use crate::verify::build_system;

#[derive(Serialize)]
struct MomentsReport {
    schema_version: u32,
    tables: Vec<MomentDoc>,
}

pub fn cmd_moments(cfg: &RunConfig, cache: &MomentCache) -> Result<String> {
    let ctx = PrecisionContext::new(cfg.bits)?;
    let tables: Vec<MomentDoc> = cfg
        .t_grid
        .par_iter()
        .map(|t| -> Result<MomentDoc> {
            let p = WeightParams::parse(&ctx, &cfg.alpha, &cfg.beta, &cfg.mu, t)?;
            let (tab, _) = cache
                .get_or_compute(&p, cfg.n_max, &ctx)
                .with_context(|| format!("moments at t = {t}"))?;
            Ok(MomentDoc::from_table(&tab, cfg.bits))
        })
        .collect::<Result<_>>()?;
    match cfg.format {
        Format::Json => Ok(serde_json::to_string_pretty(&MomentsReport {
            schema_version: SCHEMA_VERSION,
            tables,
        })? + "\n"),
        Format::Csv | Format::Text => {
            let rows = tables.iter().flat_map(|d| {
                d.moments
                    .iter()
                    .map(move |m| vec![d.t.clone(), m.k.to_string(), m.v.clone(), m.d1.clone(), m.d2.clone()])
            });
            table_out(cfg.format, "moments", &["t", "k", "w", "dw_dt", "d2w_dt2"], rows)
        }
    }
}

fn table_out(format: Format, name: &str, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(if format == Format::Text { b'\t' } else { b',' })
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let body = String::from_utf8(w.into_inner()?)?;
    Ok(format!("# {name} schema_version={SCHEMA_VERSION}\n{body}"))
}

#[derive(Serialize)]
struct CoeffRow {
    t: String,
    family: &'static str,
    n: usize,
    beta: [String; 3],
    gamma: [String; 3],
}

fn jet3(j: &Jet2) -> [String; 3] {
    [to_decimal(&j.v), to_decimal(&j.d1), to_decimal(&j.d2)]
}

#[derive(Serialize)]
struct RecurrenceReport {
    schema_version: u32,
    rows: Vec<CoeffRow>,
}

pub fn cmd_recurrence(cfg: &RunConfig, cache: &MomentCache) -> Result<String> {
    let per_t: Vec<Vec<CoeffRow>> = cfg
        .t_grid
        .par_iter()
        .map(|t| -> Result<Vec<CoeffRow>> {
            let ts = build_system(cfg, t, cache)?;
            let mut rows = Vec::new();
            for (family, rc) in [("base", &ts.rc), ("tilde", &ts.trc)] {
                for n in 0..=cfg.n_max {
                    rows.push(CoeffRow {
                        t: t.clone(),
                        family,
                        n,
                        beta: jet3(&rc.beta[n]),
                        gamma: jet3(&rc.gamma[n]),
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<CoeffRow> = per_t.into_iter().flatten().collect();
    match cfg.format {
        Format::Json => Ok(serde_json::to_string_pretty(&RecurrenceReport {
            schema_version: SCHEMA_VERSION,
            rows,
        })? + "\n"),
        f => {
            let header = [
                "t", "family", "n", "beta", "dbeta_dt", "d2beta_dt2", "gamma", "dgamma_dt", "d2gamma_dt2",
            ];
            let it = rows.into_iter().map(|r| {
                let mut v = vec![r.t, r.family.to_string(), r.n.to_string()];
                v.extend(r.beta);
                v.extend(r.gamma);
                v
            });
            table_out(f, "recurrence", &header, it)
        }
    }
}

pub const PVI_HEADER: [&str; 17] = [
    "n",
    "t",
    "q",
    "dq_dt",
    "d2q_dt2",
    "p",
    "delta1",
    "delta2",
    "delta3",
    "delta4",
    "pvi_residual",
    "hamilton_residual",
    "hamilton_p_residual",
    "delta1_derived",
    "pvi_residual_derived",
    "hamilton_p_residual_derived",
    "status",
];

pub fn pvi_rows(cfg: &RunConfig, cache: &MomentCache) -> Result<Vec<Vec<String>>> {
    let per_t: Vec<Vec<Vec<String>>> = cfg
        .t_grid
        .par_iter()
        .map(|t| -> Result<Vec<Vec<String>>> {
            let ts = build_system(cfg, t, cache)?;
            let mut rows = Vec::new();
            for n in 1..=cfg.n_max {
                let cfl = closed_form_ladder(&ts, n)?;
                let head = vec![n.to_string(), t.clone()];
                let (st, dst) = match (pvi_state(&ts, &cfl), pvi_state_derived(&ts, &cfl)) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(Error::DegenerateTranscendent), _) | (_, Err(Error::DegenerateTranscendent)) => {
                        let mut r = head;
                        r.resize(PVI_HEADER.len() - 1, String::new());
                        r.push("SKIPPED".into());
                        rows.push(r);
                        continue;
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e.into()),
                };
                let flip = |mut d: [rug::Float; 4]| {
                    if let Some(CorruptSpec::DeltaSign(k)) = cfg.corrupt {
                        d[k - 1] = -d[k - 1].clone();
                    }
                    d
                };
                let mut r = head;
                r.extend([to_decimal(&st.q.v), to_decimal(&st.q.d1), to_decimal(&st.q.d2), to_decimal(&st.p.v)]);
                r.extend(st.delta.iter().map(to_decimal));
                r.push(to_decimal(&pvi_residual_with(&st, &flip(st.delta.clone()))?));
                r.push(to_decimal(&hamilton_residual(&st)?));
                r.push(to_decimal(&hamilton_p_residual(&st)?));
                r.push(to_decimal(&dst.delta[0]));
                r.push(to_decimal(&pvi_residual_with(&dst, &flip(dst.delta.clone()))?));
                r.push(to_decimal(&hamilton_p_residual(&dst)?));
                r.push("OK".into());
                rows.push(r);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_t.into_iter().flatten().collect())
}

pub fn cmd_pvi(cfg: &RunConfig, cache: &MomentCache) -> Result<String> {
    let rows = pvi_rows(cfg, cache)?;
    match cfg.format {
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .into_iter()
                .map(|r| {
                    PVI_HEADER
                        .iter()
                        .zip(r)
                        .map(|(k, v)| (k.to_string(), serde_json::Value::String(v)))
                        .collect()
                })
                .collect();
            let doc = serde_json::json!({ "schema_version": SCHEMA_VERSION, "rows": objs });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        f => table_out(f, "pvi-table", &PVI_HEADER, rows.into_iter()),
    }
}
