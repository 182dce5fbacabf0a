//! Scenario configuration: a flat `section.key = value` text format with
//! `#` comments, strict unknown-key rejection and documented defaults.

use std::collections::BTreeMap;

use tdtunnel_core::model::{BarrierSpec, EnergyPair, Particle, PerturbationSpec, Segment};
use tdtunnel_core::stationary::evanescent_kappa;

use crate::CliError;

/// Fully resolved scenario. Every optional section carries its documented
/// default so that serializing and re-parsing is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub particle: Particle,
    pub barrier: BarrierSpec,
    pub perturbation: PerturbationSpec,
    pub energy_pair: EnergyPair,
    /// Measurement interval [x_j, x_k]; defaults to the whole barrier.
    pub interval: (f64, f64),
    /// Density grid: time steps, space steps, final time.
    pub grid_nt: usize,
    pub grid_nx: usize,
    pub grid_t_max: f64,
    /// Reference-propagator options.
    pub oracle_x_min: f64,
    pub oracle_x_max: f64,
    pub oracle_n_points: usize,
    pub oracle_dt: f64,
    pub oracle_steps: usize,
    pub oracle_x0: f64,
    pub oracle_sigma: f64,
    pub oracle_k0: f64,
    /// Emit a |psi|^2 snapshot every N steps; 0 disables snapshots.
    pub oracle_snapshot_every: usize,
    /// Barrier lengths scanned by the hartman-scan command.
    pub hartman_lengths: Vec<f64>,
    /// Post-measurement energy for the measurement-bound time; defaults
    /// to particle.energy - perturbation V0.
    pub measurement_e_meas: f64,
    /// Output file prefix (overridable with --out).
    pub output_prefix: String,
}

const KNOWN_KEYS: &[&str] = &[
    "particle.mass",
    "particle.energy",
    "barrier.u0",
    "barrier.length",
    "barrier.segments",
    "perturbation.kind",
    "perturbation.v0",
    "perturbation.angular_frequency",
    "perturbation.center",
    "perturbation.width",
    "energy_pair.e_k",
    "energy_pair.e_j",
    "interval.x_j",
    "interval.x_k",
    "grid.nt",
    "grid.nx",
    "grid.t_max",
    "oracle.x_min",
    "oracle.x_max",
    "oracle.n_points",
    "oracle.dt",
    "oracle.steps",
    "oracle.x0",
    "oracle.sigma",
    "oracle.k0",
    "oracle.snapshot_every",
    "hartman.lengths",
    "measurement.e_meas",
    "output.prefix",
];

struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Parse {
                line: line_no,
                message: format!("expected `section.key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Parse {
                    line: line_no,
                    message: format!("unknown key `{key}`"),
                });
            }
            if entries.insert(key.to_string(), (line_no, value.to_string())).is_some() {
                return Err(CliError::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn required_f64(&mut self, key: &str) -> Result<f64, CliError> {
        match self.take(key) {
            Some((line, v)) => parse_f64(key, line, &v),
            None => Err(CliError::Validation {
                field: key.to_string(),
                message: "required key is missing".into(),
            }),
        }
    }

    fn optional_f64(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.take(key) {
            Some((line, v)) => parse_f64(key, line, &v),
            None => Ok(default),
        }
    }

    fn optional_usize(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.take(key) {
            Some((line, v)) => v.parse().map_err(|_| CliError::Parse {
                line,
                message: format!("`{key}` must be a non-negative integer, got `{v}`"),
            }),
            None => Ok(default),
        }
    }
}

fn parse_f64(key: &str, line: usize, v: &str) -> Result<f64, CliError> {
    v.parse().map_err(|_| CliError::Parse {
        line,
        message: format!("`{key}` must be a number, got `{v}`"),
    })
}

fn validation(field: &str, e: tdtunnel_core::Error) -> CliError {
    CliError::Validation {
        field: field.to_string(),
        message: e.to_string(),
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    let mut raw = RawConfig::parse(text)?;

    let mass = raw.required_f64("particle.mass")?;
    let energy = raw.required_f64("particle.energy")?;
    let particle = Particle::new(mass, energy).map_err(|e| validation("particle", e))?;

    let barrier = match raw.take("barrier.segments") {
        Some((line, spec)) => {
            if raw.take("barrier.u0").is_some() || raw.take("barrier.length").is_some() {
                return Err(CliError::Validation {
                    field: "barrier".into(),
                    message: "give either barrier.segments or barrier.u0/barrier.length, not both"
                        .into(),
                });
            }
            let mut segments = Vec::new();
            for part in spec.split(';') {
                let fields: Vec<&str> = part.split(':').map(str::trim).collect();
                if fields.len() != 3 {
                    return Err(CliError::Parse {
                        line,
                        message: format!(
                            "segment `{part}` must be `x_start:x_end:u` (semicolon-separated)"
                        ),
                    });
                }
                segments.push(Segment {
                    x_start: parse_f64("barrier.segments", line, fields[0])?,
                    x_end: parse_f64("barrier.segments", line, fields[1])?,
                    u: parse_f64("barrier.segments", line, fields[2])?,
                });
            }
            BarrierSpec::from_segments(segments).map_err(|e| validation("barrier.segments", e))?
        }
        None => {
            let u0 = raw.required_f64("barrier.u0")?;
            let length = raw.required_f64("barrier.length")?;
            BarrierSpec::rectangular(u0, length).map_err(|e| validation("barrier", e))?
        }
    };
    let length = barrier.length();

    let kind = raw
        .take("perturbation.kind")
        .map(|(_, v)| v)
        .unwrap_or_else(|| "constant".to_string());
    let v0 = raw.optional_f64("perturbation.v0", 0.1)?;
    let perturbation = match kind.as_str() {
        "constant" => PerturbationSpec::Constant { v0 },
        "sinusoidal" => PerturbationSpec::Sinusoidal {
            v0,
            angular_frequency: raw.required_f64("perturbation.angular_frequency")?,
        },
        "gaussian_pulse" => PerturbationSpec::GaussianPulse {
            v0,
            center: raw.required_f64("perturbation.center")?,
            width: raw.required_f64("perturbation.width")?,
        },
        other => {
            return Err(CliError::Validation {
                field: "perturbation.kind".into(),
                message: format!(
                    "must be constant, sinusoidal or gaussian_pulse, got `{other}`"
                ),
            })
        }
    };
    perturbation
        .validate()
        .map_err(|e| validation("perturbation", e))?;

    let e_k = raw.optional_f64("energy_pair.e_k", energy)?;
    let e_j = raw.optional_f64("energy_pair.e_j", energy)?;
    let energy_pair = EnergyPair::new(e_k, e_j).map_err(|e| validation("energy_pair", e))?;

    let x_j = raw.optional_f64("interval.x_j", 0.0)?;
    let x_k = raw.optional_f64("interval.x_k", length)?;
    if !(0.0..=length).contains(&x_j) || !(x_j..=length).contains(&x_k) || x_j >= x_k {
        return Err(CliError::Validation {
            field: "interval".into(),
            message: format!("need 0 <= x_j < x_k <= {length}, got [{x_j}, {x_k}]"),
        });
    }

    // default k0 matches the particle energy: k = sqrt(2 m E)
    let k0_default = (2.0 * mass * energy).sqrt();
    let cfg = ScenarioConfig {
        particle,
        barrier,
        perturbation,
        energy_pair,
        interval: (x_j, x_k),
        grid_nt: raw.optional_usize("grid.nt", 201)?,
        grid_nx: raw.optional_usize("grid.nx", 101)?,
        grid_t_max: raw.optional_f64("grid.t_max", 50.0)?,
        oracle_x_min: raw.optional_f64("oracle.x_min", -250.0)?,
        oracle_x_max: raw.optional_f64("oracle.x_max", 250.0)?,
        oracle_n_points: raw.optional_usize("oracle.n_points", 2501)?,
        oracle_dt: raw.optional_f64("oracle.dt", 0.01)?,
        oracle_steps: raw.optional_usize("oracle.steps", 15_000)?,
        oracle_x0: raw.optional_f64("oracle.x0", -60.0)?,
        oracle_sigma: raw.optional_f64("oracle.sigma", 15.0)?,
        oracle_k0: raw.optional_f64("oracle.k0", k0_default)?,
        oracle_snapshot_every: raw.optional_usize("oracle.snapshot_every", 0)?,
        hartman_lengths: match raw.take("hartman.lengths") {
            Some((line, v)) => v
                .split(',')
                .map(|s| parse_f64("hartman.lengths", line, s.trim()))
                .collect::<Result<_, _>>()?,
            None => vec![0.5, 1.0, 2.0, 4.0, 8.0],
        },
        measurement_e_meas: raw.optional_f64(
            "measurement.e_meas",
            energy - perturbation.amplitude(),
        )?,
        output_prefix: raw
            .take("output.prefix")
            .map(|(_, v)| v)
            .unwrap_or_else(|| "tdtunnel".to_string()),
    };

    if let Some((key, &(line, _))) = raw.entries.iter().next().map(|(k, v)| (k.clone(), v)) {
        // keys valid in general but not for the selected perturbation kind
        return Err(CliError::Parse {
            line,
            message: format!("key `{key}` is not applicable to this configuration"),
        });
    }

    // model invariants that parsing alone cannot catch
    evanescent_kappa(&cfg.particle, cfg.barrier.segments()[0].u)
        .map_err(|e| validation("barrier.u0", e))?;
    if cfg.grid_nt < 2 || cfg.grid_nx < 2 {
        return Err(CliError::Validation {
            field: "grid".into(),
            message: format!("need nt, nx >= 2, got {} x {}", cfg.grid_nt, cfg.grid_nx),
        });
    }
    if !(cfg.grid_t_max > 0.0) {
        return Err(CliError::Validation {
            field: "grid.t_max".into(),
            message: format!("must be positive, got {}", cfg.grid_t_max),
        });
    }
    Ok(cfg)
}

/// Serializes a resolved config in the input format; `parse_config` on
/// the result reproduces the config field-for-field.
pub fn to_text(cfg: &ScenarioConfig) -> String {
    use std::fmt::Write;
    let f = |v: f64| format!("{v:.16e}");
    let mut s = String::new();
    let _ = writeln!(s, "particle.mass = {}", f(cfg.particle.mass()));
    let _ = writeln!(s, "particle.energy = {}", f(cfg.particle.energy()));
    if cfg.barrier.is_rectangular() {
        let seg = &cfg.barrier.segments()[0];
        let _ = writeln!(s, "barrier.u0 = {}", f(seg.u));
        let _ = writeln!(s, "barrier.length = {}", f(seg.x_end));
    } else {
        let parts: Vec<String> = cfg
            .barrier
            .segments()
            .iter()
            .map(|seg| format!("{}:{}:{}", f(seg.x_start), f(seg.x_end), f(seg.u)))
            .collect();
        let _ = writeln!(s, "barrier.segments = {}", parts.join("; "));
    }
    match &cfg.perturbation {
        PerturbationSpec::Constant { v0 } => {
            let _ = writeln!(s, "perturbation.kind = constant");
            let _ = writeln!(s, "perturbation.v0 = {}", f(*v0));
        }
        PerturbationSpec::Sinusoidal {
            v0,
            angular_frequency,
        } => {
            let _ = writeln!(s, "perturbation.kind = sinusoidal");
            let _ = writeln!(s, "perturbation.v0 = {}", f(*v0));
            let _ = writeln!(s, "perturbation.angular_frequency = {}", f(*angular_frequency));
        }
        PerturbationSpec::GaussianPulse { v0, center, width } => {
            let _ = writeln!(s, "perturbation.kind = gaussian_pulse");
            let _ = writeln!(s, "perturbation.v0 = {}", f(*v0));
            let _ = writeln!(s, "perturbation.center = {}", f(*center));
            let _ = writeln!(s, "perturbation.width = {}", f(*width));
        }
    }
    let _ = writeln!(s, "energy_pair.e_k = {}", f(cfg.energy_pair.e_k));
    let _ = writeln!(s, "energy_pair.e_j = {}", f(cfg.energy_pair.e_j));
    let _ = writeln!(s, "interval.x_j = {}", f(cfg.interval.0));
    let _ = writeln!(s, "interval.x_k = {}", f(cfg.interval.1));
    let _ = writeln!(s, "grid.nt = {}", cfg.grid_nt);
    let _ = writeln!(s, "grid.nx = {}", cfg.grid_nx);
    let _ = writeln!(s, "grid.t_max = {}", f(cfg.grid_t_max));
    let _ = writeln!(s, "oracle.x_min = {}", f(cfg.oracle_x_min));
    let _ = writeln!(s, "oracle.x_max = {}", f(cfg.oracle_x_max));
    let _ = writeln!(s, "oracle.n_points = {}", cfg.oracle_n_points);
    let _ = writeln!(s, "oracle.dt = {}", f(cfg.oracle_dt));
    let _ = writeln!(s, "oracle.steps = {}", cfg.oracle_steps);
    let _ = writeln!(s, "oracle.x0 = {}", f(cfg.oracle_x0));
    let _ = writeln!(s, "oracle.sigma = {}", f(cfg.oracle_sigma));
    let _ = writeln!(s, "oracle.k0 = {}", f(cfg.oracle_k0));
    let _ = writeln!(s, "oracle.snapshot_every = {}", cfg.oracle_snapshot_every);
    let lengths: Vec<String> = cfg.hartman_lengths.iter().map(|&l| f(l)).collect();
    let _ = writeln!(s, "hartman.lengths = {}", lengths.join(", "));
    let _ = writeln!(s, "measurement.e_meas = {}", f(cfg.measurement_e_meas));
    let _ = writeln!(s, "output.prefix = {}", cfg.output_prefix);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
particle.mass = 1.0
particle.energy = 0.5
barrier.u0 = 1.0
barrier.length = 1.0
";

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(
            cfg.perturbation,
            PerturbationSpec::Constant { v0: 0.1 }
        );
        assert_eq!(cfg.energy_pair.e_k, 0.5);
        assert_eq!(cfg.energy_pair.e_j, 0.5);
        assert_eq!(cfg.interval, (0.0, 1.0));
        assert_eq!(cfg.oracle_k0, 1.0);
        assert_eq!(cfg.hartman_lengths, vec![0.5, 1.0, 2.0, 4.0, 8.0]);
        assert_eq!(cfg.measurement_e_meas, 0.4);
        assert_eq!(cfg.output_prefix, "tdtunnel");
    }

    #[test]
    fn unknown_key_is_a_parse_error() {
        let text = format!("{MINIMAL}barier.u0 = 1.0\n");
        match parse_config(&text) {
            Err(CliError::Parse { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("barier.u0"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# full line comment\n\nparticle.mass = 1.0 # trailing\nparticle.energy = 0.5\nbarrier.u0 = 1.0\nbarrier.length = 1.0\n";
        assert!(parse_config(text).is_ok());
    }

    #[test]
    fn duplicate_key_rejected() {
        let text = format!("{MINIMAL}particle.mass = 2.0\n");
        assert!(matches!(
            parse_config(&text),
            Err(CliError::Parse { line: 5, .. })
        ));
    }

    #[test]
    fn validation_error_names_the_field() {
        let text = "particle.mass = 1.0\nparticle.energy = 2.0\nbarrier.u0 = 1.0\nbarrier.length = 1.0\n";
        match parse_config(text) {
            Err(CliError::Validation { field, .. }) => assert_eq!(field, "barrier.u0"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn segments_form_parses() {
        let text = "\
particle.mass = 1.0
particle.energy = 0.5
barrier.segments = 0:0.5:1.0; 0.5:1.0:1.5
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.barrier.segments().len(), 2);
        assert!(!cfg.barrier.is_rectangular());
    }

    #[test]
    fn inapplicable_perturbation_key_rejected() {
        let text = format!("{MINIMAL}perturbation.width = 1.0\n");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn round_trip_is_identity() {
        let cfg = parse_config(MINIMAL).unwrap();
        let again = parse_config(&to_text(&cfg)).unwrap();
        assert_eq!(cfg, again);

        let full = "\
particle.mass = 2.0
particle.energy = 0.25
barrier.segments = 0:1:1.0; 1:2:0.8
perturbation.kind = sinusoidal
perturbation.v0 = 0.05
perturbation.angular_frequency = 2.0
energy_pair.e_k = 0.25
energy_pair.e_j = 0.3
interval.x_j = 0.25
interval.x_k = 1.75
grid.nt = 11
grid.nx = 7
grid.t_max = 12.5
oracle.steps = 100
hartman.lengths = 1, 2
measurement.e_meas = 0.1
output.prefix = run1
";
        let cfg = parse_config(full).unwrap();
        let again = parse_config(&to_text(&cfg)).unwrap();
        assert_eq!(cfg, again);
    }
}
