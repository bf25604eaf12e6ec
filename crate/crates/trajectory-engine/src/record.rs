//! Trajectory records and their on-disk text form.
//!
//! The file layout has three data sections behind a config echo: `[jumps]`
//! holds `t,channel` lines, `[current]` holds `t,re` (plus `,im` when the
//! current is complex). Floats are written in Rust's shortest round-trip
//! form, so parsing a record reproduces every sample bit for bit. State
//! snapshots are an in-memory convenience and are not serialized.

use crate::config::{Scheme, Schedule, SdeIntegrator, UnravelingConfig};
use operator_core::{SystemParams, StateVector, C64};
use thiserror::Error;

/// Output channel that clicked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Forward: photon loss through the cavity mirror.
    Cavity,
    /// Side: atomic spontaneous emission.
    Spontaneous,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Cavity => "cavity",
            Channel::Spontaneous => "spontaneous",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cavity" => Some(Channel::Cavity),
            "spontaneous" => Some(Channel::Spontaneous),
            _ => None,
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything one stochastic realization produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub jumps: Vec<(f64, Channel)>,
    /// Filtered photocurrent at the emission cadence; `im = 0` for real
    /// currents.
    pub current_samples: Vec<(f64, C64)>,
    /// Conditioned states at the configured stride; empty unless requested.
    pub state_snapshots: Vec<(f64, StateVector)>,
    pub config: UnravelingConfig,
    pub params: SystemParams,
}

impl TrajectoryRecord {
    pub fn clicks(&self, channel: Channel) -> impl Iterator<Item = f64> + '_ {
        self.jumps
            .iter()
            .filter(move |(_, c)| *c == channel)
            .map(|(t, _)| *t)
    }

    pub fn click_count(&self, channel: Channel) -> usize {
        self.clicks(channel).count()
    }

    /// Consecutive inter-click intervals on one channel.
    pub fn waiting_intervals(&self, channel: Channel) -> Vec<f64> {
        let times: Vec<f64> = self.clicks(channel).collect();
        times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Linear interpolation of the stored current at time `t`; `None`
    /// outside the sampled range.
    pub fn current_at(&self, t: f64) -> Option<C64> {
        let s = &self.current_samples;
        if s.is_empty() || t < s[0].0 || t > s[s.len() - 1].0 {
            return None;
        }
        let k = s.partition_point(|(ts, _)| *ts <= t);
        if k == 0 {
            return Some(s[0].1);
        }
        if k == s.len() {
            return Some(s[s.len() - 1].1);
        }
        let (t0, v0) = s[k - 1];
        let (t1, v1) = s[k];
        let w = (t - t0) / (t1 - t0);
        Some(v0 * C64::new(1.0 - w, 0.0) + v1 * C64::new(w, 0.0))
    }

    pub fn write_to_string(&self) -> String {
        let mut out = String::new();
        out.push_str("# unraveling record v1\n[config]\n");
        let cfg = &self.config;
        out.push_str(&format!("scheme = {}\n", cfg.scheme));
        out.push_str(&format!("r = {}\n", cfg.r));
        out.push_str(&format!("theta = {}\n", schedule_str(&cfg.theta)));
        out.push_str(&format!("bandwidth_b = {}\n", cfg.bandwidth_b));
        out.push_str(&format!("dt = {}\n", cfg.dt));
        out.push_str(&format!("seed = {}\n", cfg.seed));
        out.push_str(&format!("duration = {}\n", cfg.duration));
        if let Some(s) = &cfg.delta_schedule {
            out.push_str(&format!("delta_omega_d = {}\n", schedule_str(s)));
        }
        if let Some(stride) = cfg.snapshot_stride {
            out.push_str(&format!("snapshot_stride = {stride}\n"));
        }
        out.push_str(&format!("integrator = {}\n", cfg.integrator.as_str()));

        let p = &self.params;
        out.push_str("[params]\n");
        out.push_str(&format!("g = {}\n", p.g));
        out.push_str(&format!("kappa = {}\n", p.kappa));
        out.push_str(&format!("gamma = {}\n", p.gamma));
        out.push_str(&format!("eps_d = {}\n", p.eps_d));
        out.push_str(&format!("delta_omega_d = {}\n", p.delta_omega_d));
        out.push_str(&format!("n_max = {}\n", p.n_max));
        out.push_str(&format!("impedance_matched = {}\n", p.impedance_matched));

        out.push_str("[jumps]\nt,channel\n");
        for (t, c) in &self.jumps {
            out.push_str(&format!("{t},{c}\n"));
        }

        let complex = cfg.scheme.complex_current();
        if complex {
            out.push_str("[current]\nt,re,im\n");
        } else {
            out.push_str("[current]\nt,re\n");
        }
        for (t, i) in &self.current_samples {
            if complex {
                out.push_str(&format!("{t},{},{}\n", i.re, i.im));
            } else {
                out.push_str(&format!("{t},{}\n", i.re));
            }
        }
        out
    }
}

fn schedule_str(s: &Schedule) -> String {
    s.points
        .iter()
        .map(|(t, v)| format!("{t}:{v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_schedule(s: &str) -> Result<Schedule, RecordError> {
    let mut points = Vec::new();
    for part in s.split(';') {
        let (t, v) = part
            .split_once(':')
            .ok_or_else(|| bad(0, format!("schedule entry `{part}` lacks a colon")))?;
        points.push((parse_f64(t, 0)?, parse_f64(v, 0)?));
    }
    Schedule::new(points).map_err(|e| bad(0, e.to_string()))
}

fn parse_f64(s: &str, line: usize) -> Result<f64, RecordError> {
    s.trim()
        .parse()
        .map_err(|_| bad(line, format!("bad float `{s}`")))
}

fn bad(line: usize, reason: String) -> RecordError {
    RecordError::Parse { line, reason }
}

#[derive(Debug, Error, PartialEq)]
pub enum RecordError {
    #[error("record line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("record is missing the [{name}] section")]
    MissingSection { name: &'static str },
    #[error("record is missing the config key `{key}`")]
    MissingKey { key: &'static str },
}

pub fn parse_record(text: &str) -> Result<TrajectoryRecord, RecordError> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Config,
        Params,
        Jumps,
        Current,
    }
    let mut section = Section::None;
    let mut kv: Vec<(String, String)> = Vec::new();
    let mut pv: Vec<(String, String)> = Vec::new();
    let mut jumps = Vec::new();
    let mut current = Vec::new();
    let (mut saw_jumps, mut saw_current) = (false, false);

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[config]" => {
                section = Section::Config;
                continue;
            }
            "[params]" => {
                section = Section::Params;
                continue;
            }
            "[jumps]" => {
                section = Section::Jumps;
                saw_jumps = true;
                continue;
            }
            "[current]" => {
                section = Section::Current;
                saw_current = true;
                continue;
            }
            _ => {}
        }
        match section {
            Section::None => return Err(bad(line_no, format!("unexpected line `{line}`"))),
            Section::Config | Section::Params => {
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| bad(line_no, "expected `key = value`".into()))?;
                let pair = (k.trim().to_string(), v.trim().to_string());
                if section == Section::Config {
                    kv.push(pair);
                } else {
                    pv.push(pair);
                }
            }
            Section::Jumps => {
                if line == "t,channel" {
                    continue;
                }
                let (t, c) = line
                    .split_once(',')
                    .ok_or_else(|| bad(line_no, "expected `t,channel`".into()))?;
                let channel = Channel::parse(c.trim())
                    .ok_or_else(|| bad(line_no, format!("unknown channel `{c}`")))?;
                jumps.push((parse_f64(t, line_no)?, channel));
            }
            Section::Current => {
                if line.starts_with("t,re") {
                    continue;
                }
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() < 2 || fields.len() > 3 {
                    return Err(bad(line_no, "expected `t,re[,im]`".into()));
                }
                let t = parse_f64(fields[0], line_no)?;
                let re = parse_f64(fields[1], line_no)?;
                let im = if fields.len() == 3 {
                    parse_f64(fields[2], line_no)?
                } else {
                    0.0
                };
                current.push((t, C64::new(re, im)));
            }
        }
    }

    let get = |key: &'static str| -> Result<&str, RecordError> {
        kv.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or(RecordError::MissingKey { key })
    };
    let getp = |key: &'static str| -> Result<&str, RecordError> {
        pv.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or(RecordError::MissingKey { key })
    };
    if kv.is_empty() {
        return Err(RecordError::MissingSection { name: "config" });
    }
    if pv.is_empty() {
        return Err(RecordError::MissingSection { name: "params" });
    }
    if !saw_jumps {
        return Err(RecordError::MissingSection { name: "jumps" });
    }
    if !saw_current {
        return Err(RecordError::MissingSection { name: "current" });
    }

    let scheme = Scheme::parse(get("scheme")?)
        .ok_or_else(|| bad(0, format!("unknown scheme `{}`", get("scheme").unwrap())))?;
    let integrator = match kv.iter().find(|(k, _)| k == "integrator") {
        Some((_, v)) => SdeIntegrator::parse(v)
            .ok_or_else(|| bad(0, format!("unknown integrator `{v}`")))?,
        None => SdeIntegrator::default(),
    };
    let config = UnravelingConfig {
        scheme,
        r: parse_f64(get("r")?, 0)?,
        theta: parse_schedule(get("theta")?)?,
        bandwidth_b: parse_f64(get("bandwidth_b")?, 0)?,
        dt: parse_f64(get("dt")?, 0)?,
        seed: get("seed")?
            .parse()
            .map_err(|_| bad(0, "bad seed".into()))?,
        duration: parse_f64(get("duration")?, 0)?,
        delta_schedule: match kv.iter().find(|(k, _)| k == "delta_omega_d") {
            Some((_, v)) => Some(parse_schedule(v)?),
            None => None,
        },
        snapshot_stride: match kv.iter().find(|(k, _)| k == "snapshot_stride") {
            Some((_, v)) => Some(v.parse().map_err(|_| bad(0, "bad stride".into()))?),
            None => None,
        },
        integrator,
    };
    let mut params = SystemParams::new(
        parse_f64(getp("g")?, 0)?,
        parse_f64(getp("kappa")?, 0)?,
        parse_f64(getp("gamma")?, 0)?,
        parse_f64(getp("eps_d")?, 0)?,
        parse_f64(getp("delta_omega_d")?, 0)?,
        getp("n_max")?
            .parse()
            .map_err(|_| bad(0, "bad n_max".into()))?,
    )
    .map_err(|e| bad(0, e.to_string()))?;
    if let Some((_, v)) = pv.iter().find(|(k, _)| k == "impedance_matched") {
        params.impedance_matched = v
            .parse()
            .map_err(|_| bad(0, format!("bad impedance_matched `{v}`")))?;
    }

    Ok(TrajectoryRecord {
        jumps,
        current_samples: current,
        state_snapshots: Vec::new(),
        config,
        params,
    })
}
