//! The scenario file format: a minimal sectioned `key = value` text format.
//!
//! UTF-8, `#` starts a comment, keys are case-sensitive. Sections `[source]`,
//! `[bs1]`, `[bs2]`, `[bs3]` and `[polarizer]` are required; `[sweep]` and
//! `[screen]` are optional and fall back to defaults. Parsing is total: every
//! problem becomes a line/column diagnostic, never a crash.

use crate::model::{amp_from_sq, ApparatusConfig};
use crate::{Error, Result};
use num_complex::Complex64;

/// One parse problem, anchored to a line and column (1-based). File-level
/// problems (missing sections) carry `line == 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            write!(f, "file: {}", self.message)
        } else {
            write!(
                f,
                "line {}, column {}: {}",
                self.line, self.column, self.message
            )
        }
    }
}

/// Render diagnostics one per line, in file order.
pub fn render_diagnostics(diags: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diags {
        out.push_str(&d.to_string());
        out.push('\n');
    }
    out
}

/// Parameter a sweep can vary. All four are moduli in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    QAbs,
    C1Abs,
    R1Abs,
    R3Abs,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 4] = [
        SweepParameter::QAbs,
        SweepParameter::C1Abs,
        SweepParameter::R1Abs,
        SweepParameter::R3Abs,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SweepParameter::QAbs => "q_abs",
            SweepParameter::C1Abs => "c1_abs",
            SweepParameter::R1Abs => "r1_abs",
            SweepParameter::R3Abs => "r3_abs",
        }
    }
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SweepParameter::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep parameter {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSection {
    pub c1_sq: f64,
    pub c1_phase: f64,
    pub c2_phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSplitterSection {
    pub r_sq: f64,
    pub r_phase: f64,
    pub t_phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarizerSection {
    pub q_abs: f64,
    pub q_phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            parameter: SweepParameter::QAbs,
            from: 0.0,
            to: 1.0,
            steps: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenSection {
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
}

impl Default for ScreenSection {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 1,
            bins: 32,
        }
    }
}

/// A fully validated scenario: apparatus parameters plus sweep and screen
/// settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub source: SourceSection,
    pub bs: [BeamSplitterSection; 3],
    pub polarizer: PolarizerSection,
    pub sweep: SweepSection,
    pub screen: ScreenSection,
}

impl Scenario {
    /// Apparatus configuration at the scenario's nominal parameters.
    pub fn config(&self) -> Result<ApparatusConfig> {
        self.config_split(
            self.source.c1_sq,
            [self.bs[0].r_sq, self.bs[1].r_sq, self.bs[2].r_sq],
            self.polarizer.q_abs,
        )
    }

    /// Configuration with the swept parameter replaced by `value` (a
    /// modulus in `[0, 1]`).
    pub fn config_with(&self, parameter: SweepParameter, value: f64) -> Result<ApparatusConfig> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Config(format!("swept value {value} outside [0, 1]")));
        }
        let mut c1_sq = self.source.c1_sq;
        let mut r_sq = [self.bs[0].r_sq, self.bs[1].r_sq, self.bs[2].r_sq];
        let mut q_abs = self.polarizer.q_abs;
        match parameter {
            SweepParameter::QAbs => q_abs = value,
            SweepParameter::C1Abs => c1_sq = value * value,
            SweepParameter::R1Abs => r_sq[0] = value * value,
            SweepParameter::R3Abs => r_sq[2] = value * value,
        }
        self.config_split(c1_sq, r_sq, q_abs)
    }

    fn config_split(&self, c1_sq: f64, r_sq: [f64; 3], q_abs: f64) -> Result<ApparatusConfig> {
        ApparatusConfig::new(
            amp_from_sq(c1_sq, self.source.c1_phase),
            amp_from_sq(1.0 - c1_sq, self.source.c2_phase),
            amp_from_sq(r_sq[0], self.bs[0].r_phase),
            amp_from_sq(1.0 - r_sq[0], self.bs[0].t_phase),
            amp_from_sq(r_sq[1], self.bs[1].r_phase),
            amp_from_sq(1.0 - r_sq[1], self.bs[1].t_phase),
            amp_from_sq(r_sq[2], self.bs[2].r_phase),
            amp_from_sq(1.0 - r_sq[2], self.bs[2].t_phase),
            Complex64::from_polar(q_abs, self.polarizer.q_phase),
        )
    }

    /// Built-in sweep presets `fig4a`..`fig4d`.
    ///
    /// - `fig4a`: mirrors, symmetric source, `|r₃|² = 0.1`; sweeps the
    ///   polarization overlap.
    /// - `fig4b`: mirrors, `|r₃| = 0.6`, `|q| = 0.6`; sweeps the source
    ///   amplitude `|c₁|`.
    /// - `fig4c`: symmetric source, `|r₃|² = 0.5`, `|q| = 0.6`; sweeps the
    ///   first splitter's `|r₁|`.
    /// - `fig4d`: mirrors, `|c₁|² = 0.25`, `|q| = 0.6`; sweeps the
    ///   recombiner's `|r₃|`.
    pub fn preset(name: &str) -> Option<Scenario> {
        let build = |c1_sq: f64, r3_sq: f64, parameter: SweepParameter| Scenario {
            source: SourceSection {
                c1_sq,
                c1_phase: 0.0,
                c2_phase: 0.0,
            },
            bs: [
                BeamSplitterSection {
                    r_sq: 1.0,
                    r_phase: 0.0,
                    t_phase: 0.0,
                },
                BeamSplitterSection {
                    r_sq: 1.0,
                    r_phase: 0.0,
                    t_phase: 0.0,
                },
                BeamSplitterSection {
                    r_sq: r3_sq,
                    r_phase: 0.0,
                    t_phase: 0.0,
                },
            ],
            polarizer: PolarizerSection {
                q_abs: 0.6,
                q_phase: 0.0,
            },
            sweep: SweepSection {
                parameter,
                ..SweepSection::default()
            },
            screen: ScreenSection::default(),
        };
        match name {
            "fig4a" => Some(build(0.5, 0.1, SweepParameter::QAbs)),
            "fig4b" => Some(build(0.5, 0.36, SweepParameter::C1Abs)),
            "fig4c" => Some(build(0.5, 0.5, SweepParameter::R1Abs)),
            "fig4d" => Some(build(0.25, 0.5, SweepParameter::R3Abs)),
            _ => None,
        }
    }
}

/// Serialize to the canonical text form: every section and key written
/// explicitly, floats in shortest round-trip notation.
pub fn serialize_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    out.push_str("[source]\n");
    out.push_str(&format!("c1_sq = {}\n", s.source.c1_sq));
    out.push_str(&format!("c1_phase = {}\n", s.source.c1_phase));
    out.push_str(&format!("c2_phase = {}\n", s.source.c2_phase));
    for (k, bs) in s.bs.iter().enumerate() {
        out.push_str(&format!("\n[bs{}]\n", k + 1));
        out.push_str(&format!("r_sq = {}\n", bs.r_sq));
        out.push_str(&format!("r_phase = {}\n", bs.r_phase));
        out.push_str(&format!("t_phase = {}\n", bs.t_phase));
    }
    out.push_str("\n[polarizer]\n");
    out.push_str(&format!("q_abs = {}\n", s.polarizer.q_abs));
    out.push_str(&format!("q_phase = {}\n", s.polarizer.q_phase));
    out.push_str("\n[sweep]\n");
    out.push_str(&format!("parameter = {}\n", s.sweep.parameter));
    out.push_str(&format!("from = {}\n", s.sweep.from));
    out.push_str(&format!("to = {}\n", s.sweep.to));
    out.push_str(&format!("steps = {}\n", s.sweep.steps));
    out.push_str("\n[screen]\n");
    out.push_str(&format!("samples = {}\n", s.screen.samples));
    out.push_str(&format!("seed = {}\n", s.screen.seed));
    out.push_str(&format!("bins = {}\n", s.screen.bins));
    out
}

const SECTIONS: [&str; 7] = [
    "source",
    "bs1",
    "bs2",
    "bs3",
    "polarizer",
    "sweep",
    "screen",
];

fn section_keys(section: &str) -> &'static [&'static str] {
    match section {
        "source" => &["c1_sq", "c1_phase", "c2_phase"],
        "bs1" | "bs2" | "bs3" => &["r_sq", "r_phase", "t_phase"],
        "polarizer" => &["q_abs", "q_phase"],
        "sweep" => &["parameter", "from", "to", "steps"],
        "screen" => &["samples", "seed", "bins"],
        _ => &[],
    }
}

/// Raw key=value storage collected during the first pass.
#[derive(Default)]
struct RawSections {
    // (section, key) → (line, column, value)
    values: std::collections::HashMap<(String, String), (usize, usize, String)>,
    // Every syntactically valid key occurrence, including ones whose value
    // was rejected; keeps "missing required key" from double-reporting.
    seen_keys: std::collections::HashSet<(String, String)>,
    seen_sections: std::collections::HashMap<String, usize>,
}

impl RawSections {
    fn take(&mut self, section: &str, key: &str) -> Option<(usize, usize, String)> {
        self.values.remove(&(section.to_string(), key.to_string()))
    }
}

/// Extract a real value constrained to `[0, 1]`.
fn unit_value(
    raw: &mut RawSections,
    diags: &mut Vec<Diagnostic>,
    section: &str,
    key: &str,
    required: bool,
    default: f64,
) -> f64 {
    match raw.take(section, key) {
        Some((line, column, v)) => match v.parse::<f64>() {
            Ok(x) if x.is_finite() && (0.0..=1.0).contains(&x) => x,
            Ok(x) => {
                diags.push(Diagnostic {
                    line,
                    column,
                    message: format!("{key} = {x} outside [0, 1]"),
                });
                default
            }
            Err(_) => {
                diags.push(Diagnostic {
                    line,
                    column,
                    message: format!("invalid number {v:?} for key {key:?}"),
                });
                default
            }
        },
        None => {
            // Missing sections and rejected values already carry their own
            // diagnostics; only report keys that never appeared at all.
            let seen = raw
                .seen_keys
                .contains(&(section.to_string(), key.to_string()));
            if required && !seen {
                if let Some(&anchor) = raw.seen_sections.get(section) {
                    diags.push(Diagnostic {
                        line: anchor,
                        column: 1,
                        message: format!("missing required key {key:?} in section [{section}]"),
                    });
                }
            }
            default
        }
    }
}

/// Extract an optional phase (any finite real, radians; defaults to 0).
fn phase_value(
    raw: &mut RawSections,
    diags: &mut Vec<Diagnostic>,
    section: &str,
    key: &str,
) -> f64 {
    match raw.take(section, key) {
        Some((line, column, v)) => match v.parse::<f64>() {
            Ok(x) if x.is_finite() => x,
            _ => {
                diags.push(Diagnostic {
                    line,
                    column,
                    message: format!("invalid number {v:?} for key {key:?}"),
                });
                0.0
            }
        },
        None => 0.0,
    }
}

/// Extract an optional positive integer from the screen section.
fn count_value(
    raw: &mut RawSections,
    diags: &mut Vec<Diagnostic>,
    key: &str,
    min: usize,
    default: usize,
) -> usize {
    match raw.take("screen", key) {
        Some((line, column, v)) => match v.parse::<usize>() {
            Ok(x) if x >= min => x,
            Ok(x) => {
                diags.push(Diagnostic {
                    line,
                    column,
                    message: format!("{key} = {x} but the minimum is {min}"),
                });
                default
            }
            Err(_) => {
                diags.push(Diagnostic {
                    line,
                    column,
                    message: format!("invalid integer {v:?} for key {key:?}"),
                });
                default
            }
        },
        None => default,
    }
}

fn char_column(line: &str, byte_idx: usize) -> usize {
    line[..byte_idx].chars().count() + 1
}

/// Parse a scenario document. On failure, returns every diagnostic found,
/// in file order.
pub fn parse_scenario(text: &str) -> std::result::Result<Scenario, Vec<Diagnostic>> {
    let mut diags: Vec<Diagnostic> = Vec::new();
    let mut raw = RawSections::default();
    let mut current: Option<String> = None;
    let mut current_known = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }

        let content_start = line.len() - line.trim_start().len();
        let trimmed = line.trim();

        if trimmed.starts_with('[') {
            let col = char_column(line, content_start);
            if !trimmed.ends_with(']') || trimmed.len() < 3 {
                diags.push(Diagnostic {
                    line: lineno,
                    column: col,
                    message: format!("malformed section header {trimmed:?}"),
                });
                current = None;
                current_known = false;
                continue;
            }
            let name = &trimmed[1..trimmed.len() - 1];
            if !SECTIONS.contains(&name) {
                diags.push(Diagnostic {
                    line: lineno,
                    column: col,
                    message: format!("unknown section [{name}]"),
                });
                current = Some(name.to_string());
                current_known = false;
                continue;
            }
            if let Some(first) = raw.seen_sections.get(name) {
                diags.push(Diagnostic {
                    line: lineno,
                    column: col,
                    message: format!("duplicate section [{name}] (first defined on line {first})"),
                });
                current = Some(name.to_string());
                current_known = false;
                continue;
            }
            raw.seen_sections.insert(name.to_string(), lineno);
            current = Some(name.to_string());
            current_known = true;
            continue;
        }

        let Some(eq) = line.find('=') else {
            diags.push(Diagnostic {
                line: lineno,
                column: char_column(line, content_start),
                message: "expected `key = value`".into(),
            });
            continue;
        };
        let key_raw = &line[..eq];
        let value_raw = &line[eq + 1..];
        let key = key_raw.trim();
        let value = value_raw.trim();
        let key_col = char_column(line, key_raw.len() - key_raw.trim_start().len());
        let value_col = if value.is_empty() {
            char_column(line, eq) + 1
        } else {
            char_column(
                line,
                eq + 1 + (value_raw.len() - value_raw.trim_start().len()),
            )
        };

        if key.is_empty() {
            diags.push(Diagnostic {
                line: lineno,
                column: char_column(line, eq),
                message: "missing key before `=`".into(),
            });
            continue;
        }
        let Some(section) = current.clone() else {
            diags.push(Diagnostic {
                line: lineno,
                column: key_col,
                message: format!("key {key:?} appears before any section header"),
            });
            continue;
        };
        if !current_known {
            // The unknown/duplicate section already produced a diagnostic.
            continue;
        }
        if !section_keys(&section).contains(&key) {
            diags.push(Diagnostic {
                line: lineno,
                column: key_col,
                message: format!("unknown key {key:?} in section [{section}]"),
            });
            continue;
        }
        if let Some((first, _, _)) = raw.values.get(&(section.clone(), key.to_string())) {
            diags.push(Diagnostic {
                line: lineno,
                column: key_col,
                message: format!("duplicate key {key:?} (first set on line {first})"),
            });
            continue;
        }
        raw.seen_keys.insert((section.clone(), key.to_string()));
        if value.is_empty() {
            diags.push(Diagnostic {
                line: lineno,
                column: value_col,
                message: format!("missing value for key {key:?}"),
            });
            continue;
        }
        raw.values.insert(
            (section, key.to_string()),
            (lineno, value_col, value.to_string()),
        );
    }

    // Required sections, in canonical order.
    for required in ["source", "bs1", "bs2", "bs3", "polarizer"] {
        if !raw.seen_sections.contains_key(required) {
            diags.push(Diagnostic {
                line: 0,
                column: 0,
                message: format!("missing required section [{required}]"),
            });
        }
    }

    let c1_sq = unit_value(&mut raw, &mut diags, "source", "c1_sq", true, 0.5);
    let c1_phase = phase_value(&mut raw, &mut diags, "source", "c1_phase");
    let c2_phase = phase_value(&mut raw, &mut diags, "source", "c2_phase");

    let mut bs_sections = Vec::new();
    for name in ["bs1", "bs2", "bs3"] {
        let r_sq = unit_value(&mut raw, &mut diags, name, "r_sq", true, 0.5);
        let r_phase = phase_value(&mut raw, &mut diags, name, "r_phase");
        let t_phase = phase_value(&mut raw, &mut diags, name, "t_phase");
        bs_sections.push(BeamSplitterSection {
            r_sq,
            r_phase,
            t_phase,
        });
    }

    let q_abs = unit_value(&mut raw, &mut diags, "polarizer", "q_abs", true, 1.0);
    let q_phase = phase_value(&mut raw, &mut diags, "polarizer", "q_phase");

    let parameter = match raw.take("sweep", "parameter") {
        Some((line, column, v)) => match v.parse::<SweepParameter>() {
            Ok(p) => p,
            Err(_) => {
                diags.push(Diagnostic {
                    line,
                    column,
                    message: format!(
                        "unknown sweep parameter {v:?} (expected q_abs, c1_abs, r1_abs or r3_abs)"
                    ),
                });
                SweepParameter::QAbs
            }
        },
        None => SweepSection::default().parameter,
    };
    let from = unit_value(
        &mut raw,
        &mut diags,
        "sweep",
        "from",
        false,
        SweepSection::default().from,
    );
    let to = unit_value(
        &mut raw,
        &mut diags,
        "sweep",
        "to",
        false,
        SweepSection::default().to,
    );
    let steps = match raw.take("sweep", "steps") {
        Some((line, column, v)) => match v.parse::<usize>() {
            Ok(x) if x >= 2 => x,
            Ok(x) => {
                diags.push(Diagnostic {
                    line,
                    column,
                    message: format!("steps = {x} but a sweep grid needs at least 2 points"),
                });
                SweepSection::default().steps
            }
            Err(_) => {
                diags.push(Diagnostic {
                    line,
                    column,
                    message: format!("invalid integer {v:?} for key \"steps\""),
                });
                SweepSection::default().steps
            }
        },
        None => SweepSection::default().steps,
    };

    let screen_defaults = ScreenSection::default();
    let samples = count_value(&mut raw, &mut diags, "samples", 1, screen_defaults.samples);
    let bins = count_value(&mut raw, &mut diags, "bins", 1, screen_defaults.bins);
    let seed = match raw.take("screen", "seed") {
        Some((line, column, v)) => match v.parse::<u64>() {
            Ok(x) => x,
            Err(_) => {
                diags.push(Diagnostic {
                    line,
                    column,
                    message: format!("invalid integer {v:?} for key \"seed\""),
                });
                screen_defaults.seed
            }
        },
        None => screen_defaults.seed,
    };

    if !diags.is_empty() {
        diags.sort_by_key(|d| (d.line, d.column));
        return Err(diags);
    }

    Ok(Scenario {
        source: SourceSection {
            c1_sq,
            c1_phase,
            c2_phase,
        },
        bs: [
            bs_sections[0].clone(),
            bs_sections[1].clone(),
            bs_sections[2].clone(),
        ],
        polarizer: PolarizerSection { q_abs, q_phase },
        sweep: SweepSection {
            parameter,
            from,
            to,
            steps,
        },
        screen: ScreenSection {
            samples,
            seed,
            bins,
        },
    })
}
