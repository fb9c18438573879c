//! JSON run configuration for custom one- and two-atom runs.
//!
//! Numbers may be written as JSON numbers or as short expressions, e.g.
//! `"sqrt(1/10)"` for an amplitude or `"0.5pi"` for a phase. The source text
//! is kept so that a parsed config serializes back to what was written.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{CorrelatedInit, ModelParams, ProductInit, TwoAtomInit};
use crate::numerics::{TimeGrid, C64};
use crate::scenarios::{Initial, ModelKind, Observable, Scenario, Series};

/// A real number with the expression it was written as, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    value: f64,
    text: Option<String>,
}

impl Expr {
    pub fn number(value: f64) -> Self {
        Self { value, text: None }
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Self {
        Self::number(value)
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let value = eval(s)?;
        Ok(Self {
            value,
            text: Some(s.to_string()),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.text {
            Some(t) => f.write_str(t),
            None => write!(f, "{}", self.value),
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.text {
            Some(t) => s.serialize_str(t),
            None => s.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Expr::number(v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Evaluate `+ - * /`, parentheses, `sqrt(..)`, `pi` and a number directly
/// followed by `pi` (`0.5pi`).
pub fn eval(src: &str) -> Result<f64> {
    let mut p = Parser { s: src.as_bytes(), i: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(p.fail("unexpected trailing input"));
    }
    if !v.is_finite() {
        return Err(Error::invalid(format!("expression `{src}`"), "evaluates to a non-finite value"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn fail(&self, reason: &str) -> Error {
        Error::invalid(
            format!("expression `{}`", String::from_utf8_lossy(self.s)),
            format!("{reason} at offset {}", self.i),
        )
    }

    fn skip_ws(&mut self) {
        while self.s.get(self.i).is_some_and(u8::is_ascii_whitespace) {
            self.i += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.i..].starts_with(tok.as_bytes()) {
            self.i += tok.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat("+") {
                v += self.term()?;
            } else if self.eat("-") {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.factor()?;
        loop {
            if self.eat("*") {
                v *= self.factor()?;
            } else if self.eat("/") {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64> {
        if self.eat("-") {
            return Ok(-self.factor()?);
        }
        if self.eat("(") {
            let v = self.expr()?;
            return if self.eat(")") { Ok(v) } else { Err(self.fail("expected `)`")) };
        }
        if self.eat("sqrt") {
            if !self.eat("(") {
                return Err(self.fail("expected `(` after sqrt"));
            }
            let v = self.expr()?;
            if !self.eat(")") {
                return Err(self.fail("expected `)`"));
            }
            if v < 0.0 {
                return Err(self.fail("square root of a negative number"));
            }
            return Ok(v.sqrt());
        }
        if self.eat("pi") {
            return Ok(PI);
        }
        let v = self.number()?;
        Ok(if self.eat("pi") { v * PI } else { v })
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.i;
        while let Some(&c) = self.s.get(self.i) {
            let exp_sign = (c == b'-' || c == b'+') && matches!(self.s.get(self.i.wrapping_sub(1)), Some(b'e' | b'E'));
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.i += 1;
            } else {
                break;
            }
        }
        if start == self.i {
            return Err(self.fail("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.i])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.fail("malformed number"))
    }
}

/// Short label for an angle: multiples of π/4 print as `0`, `0.25pi`, `pi`,
/// `1.5pi`; anything else prints in radians.
pub fn angle_label(theta: f64) -> String {
    let k = theta / PI;
    let quarters = (k * 4.0).round();
    if (k * 4.0 - quarters).abs() < 1e-9 {
        match quarters as i64 {
            0 => "0".to_string(),
            4 => "pi".to_string(),
            q => format!("{}pi", q as f64 / 4.0),
        }
    } else {
        format!("{theta}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    OneAtom,
    TwoAtom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub omega0: Expr,
    pub omega_c: Expr,
    pub coupling: Expr,
    pub damping: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipole: Option<Expr>,
}

impl ParamsConfig {
    pub fn to_params(&self) -> Result<ModelParams> {
        ModelParams::new(
            self.omega0.value(),
            self.omega_c.value(),
            self.coupling.value(),
            self.damping.value(),
            self.dipole.as_ref().map_or(0.0, Expr::value),
        )
    }
}

/// Atom amplitudes of the uncorrelated partner, `b_k e^{i phase_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductConfig {
    pub b1: Expr,
    pub b2: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1_phase: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2_phase: Option<Expr>,
}

/// Initial amplitudes. One-atom runs use `c1`, `c2`, `theta` and optionally
/// `product`; two-atom runs use `c1`, `c2`, `c3`, `theta1`, `theta2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub c1: Expr,
    pub c2: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c3: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta1: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta2: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<ProductConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// End time in units of the inverse coupling.
    pub t_end: Expr,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::invalid("format", format!("`{other}` is not csv or json"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub params: ParamsConfig,
    pub initial: InitialConfig,
    pub grid: GridConfig,
    pub observables: Vec<String>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Phase that a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepPhase {
    Theta,
    Theta1,
    Theta2,
}

impl SweepPhase {
    pub fn name(self) -> &'static str {
        match self {
            SweepPhase::Theta => "theta",
            SweepPhase::Theta1 => "theta1",
            SweepPhase::Theta2 => "theta2",
        }
    }
}

impl FromStr for SweepPhase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(Self::Theta),
            "theta1" => Ok(Self::Theta1),
            "theta2" => Ok(Self::Theta2),
            other => Err(Error::invalid("phase", format!("`{other}` is not theta, theta1 or theta2"))),
        }
    }
}

fn angle(field: &Option<Expr>) -> f64 {
    field.as_ref().map_or(0.0, Expr::value)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::invalid("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// Check every field, then build the scenario once to catch cross-field
    /// problems.
    pub fn validate(&self) -> Result<()> {
        let init = &self.initial;
        match self.model {
            ModelChoice::OneAtom => {
                for (name, f) in [("initial.c3", &init.c3), ("initial.theta1", &init.theta1), ("initial.theta2", &init.theta2)] {
                    if f.is_some() {
                        return Err(Error::invalid(name, "not used by the one-atom model"));
                    }
                }
            }
            ModelChoice::TwoAtom => {
                if init.c3.is_none() {
                    return Err(Error::invalid("initial.c3", "required by the two-atom model"));
                }
                if init.theta.is_some() {
                    return Err(Error::invalid("initial.theta", "two-atom runs use theta1 and theta2"));
                }
                if init.product.is_some() {
                    return Err(Error::invalid("initial.product", "not used by the two-atom model"));
                }
            }
        }
        if self.observables.is_empty() {
            return Err(Error::invalid("observables", "at least one observable is required"));
        }
        self.to_scenario("config").map(|_| ())
    }

    fn grid(&self, params: &ModelParams) -> Result<TimeGrid> {
        let t_end = self.grid.t_end.value();
        if t_end.is_nan() || t_end <= 0.0 {
            return Err(Error::invalid("grid.t_end", "must be positive"));
        }
        if self.grid.n_points < 2 {
            return Err(Error::invalid("grid.n_points", "need at least two points"));
        }
        TimeGrid::uniform(0.0, t_end / params.coupling, self.grid.n_points)
    }

    fn initial_state(&self, theta: Option<f64>, theta1: Option<f64>, theta2: Option<f64>) -> Result<Initial> {
        let init = &self.initial;
        let (c1, c2) = (init.c1.value(), init.c2.value());
        match self.model {
            ModelChoice::OneAtom => {
                let corr = CorrelatedInit::new(c1, c2, theta.unwrap_or(angle(&init.theta)))?;
                let prod = match &init.product {
                    None => ProductInit::from_marginals(&corr),
                    Some(p) => ProductInit::with_mode_of(
                        &corr,
                        C64::from_polar(p.b1.value(), angle(&p.b1_phase)),
                        C64::from_polar(p.b2.value(), angle(&p.b2_phase)),
                    )?,
                };
                Ok(Initial::OneAtom { corr, prod: Some(prod) })
            }
            ModelChoice::TwoAtom => {
                let c3 = init.c3.as_ref().map_or(0.0, Expr::value);
                Ok(Initial::TwoAtom(TwoAtomInit::new(
                    c1,
                    c2,
                    c3,
                    theta1.unwrap_or(angle(&init.theta1)),
                    theta2.unwrap_or(angle(&init.theta2)),
                )?))
            }
        }
    }

    fn kind(&self) -> ModelKind {
        match self.model {
            ModelChoice::OneAtom => ModelKind::OneAtom,
            ModelChoice::TwoAtom => ModelKind::TwoAtom,
        }
    }

    fn observables(&self) -> Result<Vec<Observable>> {
        self.observables.iter().map(|o| o.parse()).collect()
    }

    pub fn to_scenario(&self, name: &str) -> Result<Scenario> {
        let params = self.params.to_params()?;
        let series = vec![Series {
            label: "run".to_string(),
            params,
            initial: self.initial_state(None, None, None)?,
        }];
        Scenario::new(name, "custom run", self.kind(), self.grid(&params)?, self.observables()?, series)
    }

    /// One series per phase value, labelled `<phase>_<value>`.
    pub fn phase_sweep(&self, name: &str, phase: SweepPhase, values: &[f64]) -> Result<Scenario> {
        match (self.model, phase) {
            (ModelChoice::OneAtom, SweepPhase::Theta) | (ModelChoice::TwoAtom, SweepPhase::Theta1 | SweepPhase::Theta2) => {}
            _ => {
                return Err(Error::invalid(
                    "phase",
                    format!("{} does not apply to the {:?} model", phase.name(), self.model),
                ))
            }
        }
        if values.is_empty() {
            return Err(Error::invalid("values", "sweep needs at least one value"));
        }
        let params = self.params.to_params()?;
        let series = values
            .iter()
            .map(|&v| {
                let initial = match phase {
                    SweepPhase::Theta => self.initial_state(Some(v), None, None)?,
                    SweepPhase::Theta1 => self.initial_state(None, Some(v), None)?,
                    SweepPhase::Theta2 => self.initial_state(None, None, Some(v))?,
                };
                Ok(Series {
                    label: format!("{}_{}", phase.name(), angle_label(v)),
                    params,
                    initial,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(
            name,
            format!("{} sweep", phase.name()),
            self.kind(),
            self.grid(&params)?,
            self.observables()?,
            series,
        )
    }

    /// One-atom default: equal amplitudes, damping 6, rescaled population and
    /// its interference term.
    pub fn default_one_atom() -> Self {
        Self {
            model: ModelChoice::OneAtom,
            params: ParamsConfig {
                omega0: 0.0.into(),
                omega_c: 0.0.into(),
                coupling: 1.0.into(),
                damping: 6.0.into(),
                dipole: None,
            },
            initial: InitialConfig {
                c1: "sqrt(1/2)".parse().expect("literal"),
                c2: "sqrt(1/2)".parse().expect("literal"),
                c3: None,
                theta: Some(0.0.into()),
                theta1: None,
                theta2: None,
                product: None,
            },
            grid: GridConfig {
                t_end: 15.0.into(),
                n_points: 1501,
            },
            observables: vec!["pe_corr".into(), "interference".into()],
            output: OutputConfig::default(),
        }
    }

    /// Two-atom default: the `(√(1/2), √(1/10), √(4/10))` state at damping 6.
    pub fn default_two_atom() -> Self {
        Self {
            model: ModelChoice::TwoAtom,
            params: ParamsConfig {
                omega0: 0.0.into(),
                omega_c: 0.0.into(),
                coupling: 1.0.into(),
                damping: 6.0.into(),
                dipole: Some(0.0.into()),
            },
            initial: InitialConfig {
                c1: "sqrt(1/2)".parse().expect("literal"),
                c2: "sqrt(1/10)".parse().expect("literal"),
                c3: Some("sqrt(4/10)".parse().expect("literal")),
                theta: None,
                theta1: Some(0.0.into()),
                theta2: Some(0.0.into()),
                product: None,
            },
            grid: GridConfig {
                t_end: 15.0.into(),
                n_points: 1501,
            },
            observables: vec!["concurrence".into()],
            output: OutputConfig::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SAMPLE: &str = r#"{
        "model": "one-atom",
        "params": {"omega0": 0, "omega_c": 0, "coupling": 1, "damping": "6"},
        "initial": {"c1": "sqrt(1/10)", "c2": "sqrt(9/10)", "theta": "0.5pi",
                    "product": {"b1": 0.6, "b2": 0.8, "b2_phase": "pi/2"}},
        "grid": {"t_end": 15, "n_points": 151},
        "observables": ["pe_corr", "distance"],
        "output": {"format": "json"}
    }"#;

    #[test]
    fn expressions() {
        assert_eq!(eval("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(eval("pi").unwrap(), PI);
        assert_eq!(eval("3pi/2").unwrap(), 1.5 * PI);
        assert_eq!(eval("sqrt(1/10)").unwrap(), 0.1f64.sqrt());
        assert_eq!(eval(" -2 * (1 + 0.5) ").unwrap(), -3.0);
        assert_eq!(eval("1e-3").unwrap(), 1e-3);
        assert_eq!(eval("2.5E+2").unwrap(), 250.0);
        for bad in ["", "sqrt(-1)", "1/0", "pie", "2 3", "(1", "sqrt 2"] {
            assert!(eval(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn labels() {
        assert_eq!(angle_label(0.0), "0");
        assert_eq!(angle_label(PI / 2.0), "0.5pi");
        assert_eq!(angle_label(PI), "pi");
        assert_eq!(angle_label(1.5 * PI), "1.5pi");
        assert_eq!(angle_label(1.0), "1");
    }

    #[test]
    fn parses_and_roundtrips() {
        let cfg = RunConfig::from_json(SAMPLE).unwrap();
        assert_eq!(cfg.initial.theta.as_ref().unwrap().value(), 0.5 * PI);
        assert_eq!(cfg.output.format, OutputFormat::Json);
        let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
        for d in [RunConfig::default_one_atom(), RunConfig::default_two_atom()] {
            d.validate().unwrap();
            assert_eq!(RunConfig::from_json(&d.to_json().unwrap()).unwrap(), d);
        }
    }

    fn field_of(text: &str) -> String {
        match RunConfig::from_json(text).unwrap_err() {
            Error::Invalid { field, .. } => field,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_names_the_field() {
        assert_eq!(field_of(&SAMPLE.replace("\"damping\": \"6\"", "\"damping\": -1")), "params.damping");
        assert_eq!(field_of(&SAMPLE.replace("sqrt(9/10)", "sqrt(8/10)")), "initial");
        assert_eq!(field_of(&SAMPLE.replace("151", "1")), "grid.n_points");
        assert!(field_of(&SAMPLE.replace("\"theta\"", "\"theta1\"")).contains("theta1"));
        assert_eq!(field_of(&SAMPLE.replace("\"b1\": 0.6", "\"b1\": 0.7")), "initial.b");
        let bogus = SAMPLE.replace("\"coupling\"", "\"bogus\": 1, \"coupling\"");
        assert!(matches!(RunConfig::from_json(&bogus), Err(Error::Invalid { reason, .. }) if reason.contains("bogus")));
        assert!(matches!(
            RunConfig::from_json(&SAMPLE.replace("\"distance\"", "\"nosuch\"")),
            Err(Error::UnknownObservable(name)) if name == "nosuch"
        ));
    }

    #[test]
    fn sweeps() {
        let s = RunConfig::default_two_atom()
            .phase_sweep("s", SweepPhase::Theta1, &[0.0, PI])
            .unwrap();
        let labels: Vec<_> = s.series.iter().map(|x| x.label.as_str()).collect();
        assert_eq!(labels, ["theta1_0", "theta1_pi"]);
        assert!(RunConfig::default_two_atom().phase_sweep("s", SweepPhase::Theta, &[0.0]).is_err());
        assert!(RunConfig::default_one_atom().phase_sweep("s", SweepPhase::Theta, &[]).is_err());
    }

    proptest! {
        #[test]
        fn numeric_configs_roundtrip(damping in 0.0f64..20.0, c1sq in 0.0f64..1.0, theta in 0.0f64..std::f64::consts::TAU, n in 2usize..5000) {
            let mut cfg = RunConfig::default_one_atom();
            cfg.params.damping = damping.into();
            cfg.initial.c1 = c1sq.sqrt().into();
            cfg.initial.c2 = (1.0 - c1sq).sqrt().into();
            cfg.initial.theta = Some(theta.into());
            cfg.grid.n_points = n;
            let text = cfg.to_json().unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.to_json().unwrap(), text);
        }
    }
}
