//! Displacement records on disk.
//!
//! ```text
//! # rate_hz=100
//! # dt_s=1.0000000000000000e-2
//! # label=VFB-1
//! # payload_kg=0.125
//! # beam_m=0.35
//! time_s,displacement_mm
//! 0.0000000000000000e0,0.0000000000000000e0
//! ...
//! ```
//!
//! Comment lines carry `key=value` metadata. Floats are written with 17
//! significant digits so a write/load round trip is bitwise exact. Lines end
//! in `\n`; the text is UTF-8.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use shaperlab_core::ident::{observations, rough_guess, Observation};
use shaperlab_core::{
    design_shaper, shape_command, CommandSignal, SecondOrderParams, ShaperKind, TimeSeries,
};

use crate::error::{Error, Result};
use crate::fsutil;

pub const HEADER_ROW: &str = "time_s,displacement_mm";

/// Timestamp tolerance when checking uniform spacing, seconds.
pub const SPACING_TOL: f64 = 1e-6;

/// Command that produced a record, when known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Excitation {
    /// Setpoint jumps to `level` mm at the first sample.
    Step { level: f64 },
    /// `level` mm for `width` seconds, then zero.
    Pulse { level: f64, width: f64 },
    /// Step to `level` mm shaped by `kind` tuned to `design`.
    Shaped {
        kind: ShaperKind,
        design: SecondOrderParams,
        level: f64,
    },
}

impl Excitation {
    pub fn level(&self) -> f64 {
        match *self {
            Excitation::Step { level }
            | Excitation::Pulse { level, .. }
            | Excitation::Shaped { level, .. } => level,
        }
    }

    /// The command sampled on `n` points of spacing `dt` from `t0`.
    pub fn sample(&self, t0: f64, dt: f64, n: usize) -> Result<TimeSeries> {
        let series = match *self {
            Excitation::Step { level } => TimeSeries::constant(t0, dt, level, n)?,
            Excitation::Pulse { level, width } => {
                let samples = (0..n)
                    .map(|k| {
                        if (k as f64) * dt < width - 1e-12 {
                            level
                        } else {
                            0.0
                        }
                    })
                    .collect();
                TimeSeries::new(t0, dt, samples)?
            }
            Excitation::Shaped {
                kind,
                design,
                level,
            } => {
                let step = TimeSeries::constant(t0, dt, level, n)?;
                let shaped = shape_command(&step, design_shaper(kind, &design).train());
                let mut s = shaped.into_samples();
                s.truncate(n);
                TimeSeries::new(t0, dt, s)?
            }
        };
        Ok(series)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetMeta {
    pub label: Option<String>,
    pub payload_kg: Option<f64>,
    pub beam_m: Option<f64>,
    pub excitation: Option<Excitation>,
    /// Unrecognised keys, kept verbatim.
    pub extra: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub series: TimeSeries,
    pub meta: DatasetMeta,
    /// Known plant parameters (synthetic records only).
    pub ground_truth: Option<SecondOrderParams>,
}

impl Dataset {
    pub fn new(series: TimeSeries) -> Self {
        Self {
            series,
            meta: DatasetMeta::default(),
            ground_truth: None,
        }
    }

    pub fn label(&self) -> &str {
        self.meta.label.as_deref().unwrap_or("dataset")
    }

    pub fn observations(&self) -> Vec<Observation> {
        observations(&self.series)
    }

    /// Observations at the given sample indices, in index order.
    pub fn observations_at(&self, indices: &[usize]) -> Vec<Observation> {
        let s = self.series.samples();
        indices
            .iter()
            .map(|&i| Observation::new(self.series.time_at(i), s[i]))
            .collect()
    }

    /// Command the record was taken under. Without excitation metadata the
    /// record is treated as free vibration about the mean of its last fifth.
    pub fn command(&self) -> Result<CommandSignal> {
        match self.meta.excitation {
            Some(Excitation::Step { level }) => Ok(CommandSignal::Constant(level)),
            Some(e) => Ok(CommandSignal::Sampled(e.sample(
                self.series.t0(),
                self.series.dt(),
                self.series.len(),
            )?)),
            None => Ok(CommandSignal::Constant(self.settled_level())),
        }
    }

    fn settled_level(&self) -> f64 {
        let s = self.series.samples();
        let tail = &s[s.len() - (s.len() / 5).max(1)..];
        tail.iter().sum::<f64>() / tail.len() as f64
    }

    /// Mean-crossing estimate of the plant around the command's final value.
    pub fn rough_guess(&self) -> Result<SecondOrderParams> {
        let level = self.command()?.final_value();
        Ok(rough_guess(&self.observations(), level))
    }
}

/// Formats with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_dataset(path: &Path, ds: &Dataset) -> Result<()> {
    fsutil::write_atomic(path, to_csv(ds).as_bytes())
}

pub fn to_csv(ds: &Dataset) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "# {k}={v}");
    };
    let dt = ds.series.dt();
    kv("rate_hz", fmt_f64(1.0 / dt));
    kv("dt_s", fmt_f64(dt));
    if let Some(l) = &ds.meta.label {
        kv("label", l.clone());
    }
    if let Some(m) = ds.meta.payload_kg {
        kv("payload_kg", fmt_f64(m));
    }
    if let Some(b) = ds.meta.beam_m {
        kv("beam_m", fmt_f64(b));
    }
    match ds.meta.excitation {
        Some(Excitation::Step { level }) => {
            kv("excitation", "step".into());
            kv("level", fmt_f64(level));
        }
        Some(Excitation::Pulse { level, width }) => {
            kv("excitation", "pulse".into());
            kv("level", fmt_f64(level));
            kv("pulse_width_s", fmt_f64(width));
        }
        Some(Excitation::Shaped {
            kind,
            design,
            level,
        }) => {
            kv("excitation", "shaped".into());
            kv("level", fmt_f64(level));
            kv("shaper", kind.to_string());
            kv("shaper_omega_n", fmt_f64(design.omega_n()));
            kv("shaper_zeta", fmt_f64(design.zeta()));
        }
        None => {}
    }
    if let Some(p) = ds.ground_truth {
        kv("true_omega_n", fmt_f64(p.omega_n()));
        kv("true_zeta", fmt_f64(p.zeta()));
    }
    for (k, v) in &ds.meta.extra {
        kv(k, v.clone());
    }
    out.push_str(HEADER_ROW);
    out.push('\n');
    for (k, x) in ds.series.samples().iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_f64(ds.series.time_at(k)), fmt_f64(*x));
    }
    out
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text)
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut keys: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header_seen = false;
    for (no, line) in lines.by_ref() {
        let line = line.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if rest.is_empty() {
                continue;
            }
            let (k, v) = rest.split_once('=').ok_or_else(|| Error::MalformedHeader {
                line: no,
                message: format!("expected key=value, found {rest:?}"),
            })?;
            keys.insert(k.trim().to_string(), (no, v.trim().to_string()));
        } else if line.trim().is_empty() {
            continue;
        } else if line.trim() == HEADER_ROW {
            header_seen = true;
            break;
        } else {
            return Err(Error::MalformedHeader {
                line: no,
                message: format!("expected header row {HEADER_ROW:?}"),
            });
        }
    }
    if !header_seen {
        return Err(Error::MalformedHeader {
            line: 1,
            message: format!("missing header row {HEADER_ROW:?}"),
        });
    }

    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    for (no, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let (Some(t), Some(z), None) = (cells.next(), cells.next(), cells.next()) else {
            return Err(Error::BadRow { line: no });
        };
        rows.push((
            no,
            parse_cell(t, no, "time_s")?,
            parse_cell(z, no, "displacement_mm")?,
        ));
    }
    if rows.is_empty() {
        return Err(Error::EmptyBody);
    }

    let mut num = |key: &str| -> Result<Option<f64>> {
        match keys.remove(key) {
            None => Ok(None),
            Some((line, v)) => f64::from_str(&v)
                .map(Some)
                .map_err(|_| Error::MalformedHeader {
                    line,
                    message: format!("{key} is not a number: {v:?}"),
                }),
        }
    };
    let rate = num("rate_hz")?;
    let dt_key = num("dt_s")?;
    let dt = match (dt_key, rate) {
        (Some(dt), Some(r)) if (dt * r - 1.0).abs() > 1e-9 => {
            return Err(Error::MalformedHeader {
                line: 1,
                message: format!("dt_s={dt} disagrees with rate_hz={r}"),
            })
        }
        (Some(dt), _) => dt,
        (None, Some(r)) => 1.0 / r,
        (None, None) if rows.len() >= 2 => rows[1].1 - rows[0].1,
        (None, None) => {
            return Err(Error::MalformedHeader {
                line: 1,
                message: "single-row record needs rate_hz or dt_s".into(),
            })
        }
    };
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::MalformedHeader {
            line: 1,
            message: format!("sample step must be positive, got {dt}"),
        });
    }
    let t0 = rows[0].1;
    for (k, &(line, t, _)) in rows.iter().enumerate() {
        let expected = t0 + k as f64 * dt;
        if (t - expected).abs() > SPACING_TOL {
            return Err(Error::NonuniformTimestamps {
                line,
                expected,
                found: t,
            });
        }
    }
    let series = TimeSeries::new(t0, dt, rows.iter().map(|r| r.2).collect())?;

    let payload_kg = num("payload_kg")?;
    let beam_m = num("beam_m")?;
    let level = num("level")?;
    let width = num("pulse_width_s")?;
    let shaper_w = num("shaper_omega_n")?;
    let shaper_z = num("shaper_zeta")?;
    let true_w = num("true_omega_n")?;
    let true_z = num("true_zeta")?;
    let label = keys.remove("label").map(|(_, v)| v);
    let excitation = match keys.remove("excitation") {
        None => None,
        Some((line, kind)) => {
            let bad = |message: String| Error::MalformedHeader { line, message };
            let level = level.ok_or_else(|| bad("excitation needs level".into()))?;
            Some(match kind.as_str() {
                "step" => Excitation::Step { level },
                "pulse" => Excitation::Pulse {
                    level,
                    width: width.ok_or_else(|| bad("pulse needs pulse_width_s".into()))?,
                },
                "shaped" => {
                    let kind = keys
                        .remove("shaper")
                        .ok_or_else(|| bad("shaped excitation needs shaper".into()))?
                        .1
                        .parse::<ShaperKind>()?;
                    let design = SecondOrderParams::new(
                        shaper_w
                            .ok_or_else(|| bad("shaped excitation needs shaper_omega_n".into()))?,
                        shaper_z
                            .ok_or_else(|| bad("shaped excitation needs shaper_zeta".into()))?,
                    )?;
                    Excitation::Shaped {
                        kind,
                        design,
                        level,
                    }
                }
                other => return Err(bad(format!("unknown excitation {other:?}"))),
            })
        }
    };
    let ground_truth = match (true_w, true_z) {
        (Some(w), Some(z)) => Some(SecondOrderParams::new(w, z)?),
        (None, None) => None,
        _ => {
            return Err(Error::MalformedHeader {
                line: 1,
                message: "true_omega_n and true_zeta must appear together".into(),
            })
        }
    };
    Ok(Dataset {
        series,
        meta: DatasetMeta {
            label,
            payload_kg,
            beam_m,
            excitation,
            extra: keys.into_iter().map(|(k, (_, v))| (k, v)).collect(),
        },
        ground_truth,
    })
}

fn parse_cell(cell: &str, line: usize, column: &'static str) -> Result<f64> {
    let v = f64::from_str(cell.trim()).map_err(|_| Error::NonNumeric {
        line,
        column,
        cell: cell.to_string(),
    })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonNumeric {
            line,
            column,
            cell: cell.to_string(),
        })
    }
}
