//! Run configuration and the flat key-value config file format.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use swbnet::agents::{AgentPolicy, CalibrationTable, PolicyKind, SwbMapping};
use swbnet::engine::{Action, Condition, SessionConfig};
use swbnet::seeds;

use crate::CliError;

/// Which cooperation rule the simulated players use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyChoice {
    Calibrated,
    Conditional { alpha: f64, beta: f64 },
    AlwaysCooperate,
    AlwaysDefect,
}

/// Everything a batch run needs: session parameters, replicate count,
/// behavioral calibration, and the master seed every stream derives from.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_players: usize,
    pub rounds: u32,
    pub initial_density: f64,
    pub rich_wealth: i64,
    pub poor_wealth: i64,
    pub rich_fraction: f64,
    pub cooperation_cost_per_edge: i64,
    pub cooperation_benefit_per_edge: i64,
    pub rewiring_pair_probability: f64,
    pub points_per_usd: i64,
    pub replicates_per_condition: usize,
    pub master_seed: u64,
    pub policy: PolicyChoice,
    pub calibration: CalibrationTable,
    pub swb_mapping: SwbMapping,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        let base = SessionConfig::new(Condition::InvisibleSwb, 0);
        RunConfig {
            n_players: base.n_players,
            rounds: base.rounds,
            initial_density: base.initial_density,
            rich_wealth: base.rich_wealth,
            poor_wealth: base.poor_wealth,
            rich_fraction: base.rich_fraction,
            cooperation_cost_per_edge: base.cooperation_cost_per_edge,
            cooperation_benefit_per_edge: base.cooperation_benefit_per_edge,
            rewiring_pair_probability: base.rewiring_pair_probability,
            points_per_usd: base.points_per_usd,
            replicates_per_condition: 25,
            master_seed: 1,
            policy: PolicyChoice::Calibrated,
            calibration: CalibrationTable::default(),
            swb_mapping: SwbMapping::default(),
        }
    }
}

impl RunConfig {
    /// The per-session config for one (condition, replicate) cell. The
    /// session seed is derived from the master seed, so adding replicates
    /// never perturbs existing ones.
    pub fn session_config(&self, condition: Condition, replicate: usize) -> SessionConfig {
        let mut cfg = SessionConfig::new(
            condition,
            seeds::derive_seed(
                self.master_seed,
                &format!("session:{condition}"),
                replicate as u64,
            ),
        );
        cfg.n_players = self.n_players;
        cfg.rounds = self.rounds;
        cfg.initial_density = self.initial_density;
        cfg.rich_wealth = self.rich_wealth;
        cfg.poor_wealth = self.poor_wealth;
        cfg.rich_fraction = self.rich_fraction;
        cfg.cooperation_cost_per_edge = self.cooperation_cost_per_edge;
        cfg.cooperation_benefit_per_edge = self.cooperation_benefit_per_edge;
        cfg.rewiring_pair_probability = self.rewiring_pair_probability;
        cfg.points_per_usd = self.points_per_usd;
        cfg
    }

    pub fn agent_policy(&self) -> AgentPolicy {
        let kind = match self.policy {
            PolicyChoice::Calibrated => PolicyKind::Calibrated,
            PolicyChoice::Conditional { alpha, beta } => {
                PolicyKind::ConditionalCooperator { alpha, beta }
            }
            PolicyChoice::AlwaysCooperate => PolicyKind::AlwaysCooperate,
            PolicyChoice::AlwaysDefect => PolicyKind::AlwaysDefect,
        };
        AgentPolicy {
            kind,
            table: self.calibration.clone(),
            swb_mapping: self.swb_mapping,
        }
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        RunConfig::parse_flat(&text, path)
    }

    /// Parses the flat `key = value` format; `path` is only for error
    /// context. Lines starting with `#` and blank lines are skipped.
    pub fn parse_flat(text: &str, path: &Path) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        let mut alpha = 0.2f64;
        let mut beta = 0.6f64;
        let mut policy_name = String::from("calibrated");

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Parse {
                file: path.to_path_buf(),
                line: idx + 1,
                message: "expected `key = value`".into(),
                record: raw.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            cfg.apply_key(key, value, &mut policy_name, &mut alpha, &mut beta)
                .map_err(|message| CliError::Parse {
                    file: path.to_path_buf(),
                    line: idx + 1,
                    message,
                    record: raw.to_string(),
                })?;
        }

        cfg.policy = match policy_name.as_str() {
            "calibrated" => PolicyChoice::Calibrated,
            "conditional" => PolicyChoice::Conditional { alpha, beta },
            "always_cooperate" => PolicyChoice::AlwaysCooperate,
            "always_defect" => PolicyChoice::AlwaysDefect,
            other => return Err(CliError::config(format!(
                "unknown policy {other:?} (calibrated|conditional|always_cooperate|always_defect)"
            ))),
        };
        Ok(cfg)
    }

    fn apply_key(
        &mut self,
        key: &str,
        value: &str,
        policy_name: &mut String,
        alpha: &mut f64,
        beta: &mut f64,
    ) -> Result<(), String> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse()
                .map_err(|e| format!("bad value for {key}: {e}"))
        }

        match key {
            "n_players" => self.n_players = parse(key, value)?,
            "rounds" => self.rounds = parse(key, value)?,
            "initial_density" => self.initial_density = parse(key, value)?,
            "rich_wealth" => self.rich_wealth = parse(key, value)?,
            "poor_wealth" => self.poor_wealth = parse(key, value)?,
            "rich_fraction" => self.rich_fraction = parse(key, value)?,
            "cooperation_cost_per_edge" => self.cooperation_cost_per_edge = parse(key, value)?,
            "cooperation_benefit_per_edge" => {
                self.cooperation_benefit_per_edge = parse(key, value)?
            }
            "rewiring_pair_probability" => self.rewiring_pair_probability = parse(key, value)?,
            "points_per_usd" => self.points_per_usd = parse(key, value)?,
            "replicates_per_condition" => self.replicates_per_condition = parse(key, value)?,
            "seed" => self.master_seed = parse(key, value)?,
            "policy" => *policy_name = value.to_string(),
            "conditional_alpha" => *alpha = parse(key, value)?,
            "conditional_beta" => *beta = parse(key, value)?,
            "swb_mapping" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 5 {
                    return Err(format!("swb_mapping needs 5 levels, got {}", parts.len()));
                }
                let mut levels = [0i8; 5];
                for (slot, part) in levels.iter_mut().zip(&parts) {
                    *slot = parse("swb_mapping", part)?;
                }
                self.swb_mapping = SwbMapping::new(levels).map_err(|e| e.to_string())?;
            }
            _ => {
                if let Some(rest) = key.strip_prefix("coop_rate_") {
                    let condition: Condition = rest.parse()?;
                    self.calibration
                        .set_coop_rate(condition, parse(key, value)?)
                        .map_err(|e| e.to_string())?;
                } else if let Some(rest) = key.strip_prefix("connect_") {
                    let parts: Vec<&str> = rest.split('_').collect();
                    if parts.len() != 3 {
                        return Err(format!(
                            "expected connect_<condition>_<own>_<partner>, got {key:?}"
                        ));
                    }
                    let condition: Condition = parts[0].parse()?;
                    let own = parse_action(parts[1])?;
                    let partner = parse_action(parts[2])?;
                    self.calibration
                        .set_connect_prob(condition, own, partner, parse(key, value)?)
                        .map_err(|e| e.to_string())?;
                } else {
                    return Err(format!(
                        "unknown key {key:?}; valid keys: {}",
                        VALID_KEYS.join(", ")
                    ));
                }
            }
        }
        Ok(())
    }

    /// The config echoed back in the flat file format (also used inside
    /// the manifest).
    pub fn to_flat_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        kv("n_players", self.n_players.to_string());
        kv("rounds", self.rounds.to_string());
        kv("initial_density", self.initial_density.to_string());
        kv("rich_wealth", self.rich_wealth.to_string());
        kv("poor_wealth", self.poor_wealth.to_string());
        kv("rich_fraction", self.rich_fraction.to_string());
        kv(
            "cooperation_cost_per_edge",
            self.cooperation_cost_per_edge.to_string(),
        );
        kv(
            "cooperation_benefit_per_edge",
            self.cooperation_benefit_per_edge.to_string(),
        );
        kv(
            "rewiring_pair_probability",
            self.rewiring_pair_probability.to_string(),
        );
        kv("points_per_usd", self.points_per_usd.to_string());
        kv(
            "replicates_per_condition",
            self.replicates_per_condition.to_string(),
        );
        kv("seed", self.master_seed.to_string());
        let (policy, a, b) = match self.policy {
            PolicyChoice::Calibrated => ("calibrated", 0.2, 0.6),
            PolicyChoice::Conditional { alpha, beta } => ("conditional", alpha, beta),
            PolicyChoice::AlwaysCooperate => ("always_cooperate", 0.2, 0.6),
            PolicyChoice::AlwaysDefect => ("always_defect", 0.2, 0.6),
        };
        kv("policy", policy.to_string());
        kv("conditional_alpha", a.to_string());
        kv("conditional_beta", b.to_string());
        let levels = self.swb_mapping.levels();
        kv("swb_mapping", levels.map(|l| l.to_string()).join(","));
        for condition in Condition::BOTH {
            kv(
                &format!("coop_rate_{condition}"),
                self.calibration.coop_rate(condition).to_string(),
            );
            for own in [Action::Cooperate, Action::Defect] {
                for partner in [Action::Cooperate, Action::Defect] {
                    kv(
                        &format!(
                            "connect_{condition}_{}_{}",
                            action_key(own),
                            action_key(partner)
                        ),
                        self.calibration
                            .connect_prob(condition, own, partner)
                            .to_string(),
                    );
                }
            }
        }
        out
    }
}

fn parse_action(s: &str) -> Result<Action, String> {
    match s {
        "c" => Ok(Action::Cooperate),
        "d" => Ok(Action::Defect),
        other => Err(format!("unknown action {other:?} (c|d)")),
    }
}

fn action_key(a: Action) -> &'static str {
    match a {
        Action::Cooperate => "c",
        Action::Defect => "d",
    }
}

const VALID_KEYS: &[&str] = &[
    "n_players",
    "rounds",
    "initial_density",
    "rich_wealth",
    "poor_wealth",
    "rich_fraction",
    "cooperation_cost_per_edge",
    "cooperation_benefit_per_edge",
    "rewiring_pair_probability",
    "points_per_usd",
    "replicates_per_condition",
    "seed",
    "policy",
    "conditional_alpha",
    "conditional_beta",
    "swb_mapping",
    "coop_rate_<condition>",
    "connect_<condition>_<own>_<partner>",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_text_round_trips() {
        let mut cfg = RunConfig {
            replicates_per_condition: 7,
            master_seed: 99,
            ..RunConfig::default()
        };
        cfg.calibration
            .set_coop_rate(Condition::VisibleSwb, 0.41)
            .unwrap();

        let dir = std::env::temp_dir().join("swbnet-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, cfg.to_flat_text()).unwrap();
        let loaded = RunConfig::load(&path).unwrap();
        assert_eq!(loaded, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected_with_hints() {
        let dir = std::env::temp_dir().join("swbnet-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.cfg");
        std::fs::write(&path, "n_player = 13\n").unwrap();
        let err = RunConfig::load(&path).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("unknown key"), "{message}");
        assert!(message.contains("n_players"), "{message}");
    }

    #[test]
    fn session_seeds_differ_by_condition_and_replicate() {
        let cfg = RunConfig::default();
        let a = cfg.session_config(Condition::VisibleSwb, 0).seed;
        let b = cfg.session_config(Condition::VisibleSwb, 1).seed;
        let c = cfg.session_config(Condition::InvisibleSwb, 0).seed;
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
