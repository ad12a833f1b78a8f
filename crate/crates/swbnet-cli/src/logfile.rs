//! The event-log wire format: newline-delimited, self-describing records.
//!
//! Record types, in file order: one `HDR`, then per round `DEC`, `PAY`,
//! `SWB`, `REW`, `EDG` records (an `EDG` for round 0 precedes round 1),
//! and finally one `OUT` per player. Fields are space-separated
//! `key=value` pairs after the type tag. Floats in `OUT` use Rust's
//! shortest round-trip representation so parse(serialize(log)) is exact.
//! See `docs/event-log-format.md` for the full specification.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use swbnet::engine::{
    Action, Condition, Event, EventLog, PairState, RewiringEvent, SessionConfig, SwbRating,
    TieDecision,
};
use swbnet::graph::EdgeSnapshot;

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

pub fn serialize(log: &EventLog) -> String {
    let mut out = String::new();
    let cfg = &log.config;
    writeln!(
        out,
        "HDR v={} condition={} seed={} n_players={} rounds={} initial_density={} \
         rich_wealth={} poor_wealth={} rich_fraction={} cooperation_cost_per_edge={} \
         cooperation_benefit_per_edge={} rewiring_pair_probability={} points_per_usd={}",
        FORMAT_VERSION,
        cfg.condition,
        cfg.seed,
        cfg.n_players,
        cfg.rounds,
        cfg.initial_density,
        cfg.rich_wealth,
        cfg.poor_wealth,
        cfg.rich_fraction,
        cfg.cooperation_cost_per_edge,
        cfg.cooperation_benefit_per_edge,
        cfg.rewiring_pair_probability,
        cfg.points_per_usd,
    )
    .unwrap();

    for event in &log.events {
        match event {
            Event::Decision {
                round,
                player,
                action,
            } => writeln!(out, "DEC round={round} player={player} action={action}").unwrap(),
            Event::Payoff {
                round,
                player,
                delta,
                wealth_after,
            } => writeln!(
                out,
                "PAY round={round} player={player} delta={delta} wealth={wealth_after}"
            )
            .unwrap(),
            Event::Swb {
                round,
                player,
                rating,
            } => writeln!(
                out,
                "SWB round={round} player={player} q1={} q2={}",
                rating.q1, rating.q2
            )
            .unwrap(),
            Event::Rewiring(ev) => writeln!(
                out,
                "REW round={} pair={}-{} decider={} pre={} decision={} decider_action={} partner_action={}",
                ev.round,
                ev.pair.0,
                ev.pair.1,
                ev.decider,
                ev.pre_state,
                ev.decision,
                ev.decider_action,
                ev.partner_action
            )
            .unwrap(),
            Event::Snapshot(snapshot) => {
                let edges: Vec<String> = snapshot
                    .edges
                    .iter()
                    .map(|(u, v)| format!("{u}-{v}"))
                    .collect();
                writeln!(
                    out,
                    "EDG round={} edges={}",
                    snapshot.round,
                    edges.join(",")
                )
                .unwrap()
            }
            Event::Payout {
                player,
                points,
                usd,
            } => writeln!(out, "OUT player={player} points={points} usd={usd}").unwrap(),
        }
    }
    out
}

pub fn write_log(log: &EventLog, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, serialize(log)).map_err(CliError::io(path))
}

pub fn read_log(path: &Path) -> Result<EventLog, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    parse(&text, path)
}

struct RecordContext<'a> {
    file: &'a Path,
    line: usize,
    record: &'a str,
}

impl RecordContext<'_> {
    fn error(&self, message: impl Into<String>) -> CliError {
        CliError::Parse {
            file: self.file.to_path_buf(),
            line: self.line,
            message: message.into(),
            record: self.record.to_string(),
        }
    }

    fn field<T: FromStr>(&self, fields: &[(&str, &str)], key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let raw = fields
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| self.error(format!("missing field {key}")))?;
        raw.parse()
            .map_err(|e| self.error(format!("bad {key}={raw:?}: {e}")))
    }
}

pub fn parse(text: &str, file: &Path) -> Result<EventLog, CliError> {
    let mut config: Option<SessionConfig> = None;
    let mut events = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let ctx = RecordContext {
            file,
            line: idx + 1,
            record: line,
        };
        let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
        let fields: Vec<(&str, &str)> = rest
            .split_whitespace()
            .map(|part| {
                part.split_once('=')
                    .ok_or_else(|| ctx.error(format!("field {part:?} is not key=value")))
            })
            .collect::<Result<_, _>>()?;

        match tag {
            "HDR" => {
                let version: u32 = ctx.field(&fields, "v")?;
                if version != FORMAT_VERSION {
                    return Err(ctx.error(format!(
                        "unsupported log version {version} (expected {FORMAT_VERSION})"
                    )));
                }
                let condition: Condition = ctx.field(&fields, "condition")?;
                let seed: u64 = ctx.field(&fields, "seed")?;
                let mut cfg = SessionConfig::new(condition, seed);
                cfg.n_players = ctx.field(&fields, "n_players")?;
                cfg.rounds = ctx.field(&fields, "rounds")?;
                cfg.initial_density = ctx.field(&fields, "initial_density")?;
                cfg.rich_wealth = ctx.field(&fields, "rich_wealth")?;
                cfg.poor_wealth = ctx.field(&fields, "poor_wealth")?;
                cfg.rich_fraction = ctx.field(&fields, "rich_fraction")?;
                cfg.cooperation_cost_per_edge = ctx.field(&fields, "cooperation_cost_per_edge")?;
                cfg.cooperation_benefit_per_edge =
                    ctx.field(&fields, "cooperation_benefit_per_edge")?;
                cfg.rewiring_pair_probability = ctx.field(&fields, "rewiring_pair_probability")?;
                cfg.points_per_usd = ctx.field(&fields, "points_per_usd")?;
                config = Some(cfg);
            }
            "DEC" => events.push(Event::Decision {
                round: ctx.field(&fields, "round")?,
                player: ctx.field(&fields, "player")?,
                action: ctx.field::<Action>(&fields, "action")?,
            }),
            "PAY" => events.push(Event::Payoff {
                round: ctx.field(&fields, "round")?,
                player: ctx.field(&fields, "player")?,
                delta: ctx.field(&fields, "delta")?,
                wealth_after: ctx.field(&fields, "wealth")?,
            }),
            "SWB" => events.push(Event::Swb {
                round: ctx.field(&fields, "round")?,
                player: ctx.field(&fields, "player")?,
                rating: SwbRating {
                    q1: ctx.field(&fields, "q1")?,
                    q2: ctx.field(&fields, "q2")?,
                },
            }),
            "REW" => {
                let pair_raw: String = ctx.field(&fields, "pair")?;
                let pair = parse_pair(&pair_raw).map_err(|e| ctx.error(e))?;
                events.push(Event::Rewiring(RewiringEvent {
                    round: ctx.field(&fields, "round")?,
                    pair,
                    decider: ctx.field(&fields, "decider")?,
                    pre_state: ctx.field::<PairState>(&fields, "pre")?,
                    decision: ctx.field::<TieDecision>(&fields, "decision")?,
                    decider_action: ctx.field::<Action>(&fields, "decider_action")?,
                    partner_action: ctx.field::<Action>(&fields, "partner_action")?,
                }));
            }
            "EDG" => {
                let round: u32 = ctx.field(&fields, "round")?;
                let edges_raw = fields
                    .iter()
                    .find(|(k, _)| *k == "edges")
                    .map(|(_, v)| *v)
                    .ok_or_else(|| ctx.error("missing field edges"))?;
                let mut edges = Vec::new();
                if !edges_raw.is_empty() {
                    for part in edges_raw.split(',') {
                        edges.push(parse_pair(part).map_err(|e| ctx.error(e))?);
                    }
                }
                let n = config
                    .as_ref()
                    .map(|c| c.n_players)
                    .ok_or_else(|| ctx.error("EDG before HDR"))?;
                events.push(Event::Snapshot(EdgeSnapshot { round, n, edges }));
            }
            "OUT" => events.push(Event::Payout {
                player: ctx.field(&fields, "player")?,
                points: ctx.field(&fields, "points")?,
                usd: ctx.field(&fields, "usd")?,
            }),
            other => return Err(ctx.error(format!("unknown record type {other:?}"))),
        }
    }

    let config = config.ok_or_else(|| CliError::Parse {
        file: file.to_path_buf(),
        line: 0,
        message: "log has no HDR record".into(),
        record: String::new(),
    })?;
    Ok(EventLog { config, events })
}

fn parse_pair(raw: &str) -> Result<(usize, usize), String> {
    let (u, v) = raw
        .split_once('-')
        .ok_or_else(|| format!("bad pair {raw:?}"))?;
    Ok((
        u.parse().map_err(|e| format!("bad pair {raw:?}: {e}"))?,
        v.parse().map_err(|e| format!("bad pair {raw:?}: {e}"))?,
    ))
}
