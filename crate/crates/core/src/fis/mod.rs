//! Mamdani fuzzy inference.
//!
//! Inputs are fuzzified through Gaussian membership functions, each rule
//! fires at the minimum of its antecedent memberships, the consequent set is
//! clipped at that strength, the clipped sets are merged with `max`, and the
//! crisp output is the centroid of the merged set on a uniform grid.
//!
//! [`fis1_default`] and [`fis2_default`] are the two systems that gate the
//! adaptive phase of the cipher.

mod config;

use std::cell::Cell;

use thiserror::Error;

pub use config::load_fis_config;

/// Grid used for centroid defuzzification unless a config says otherwise.
pub const DEFAULT_GRID: usize = 1001;

/// Smallest grid a config may ask for.
pub const MIN_GRID: usize = 101;

/// Default Gaussian width as a fraction of a variable's range.
pub const DEFAULT_SIGMA_FRACTION: f64 = 0.2125;

thread_local! {
    static EVALUATIONS: Cell<u64> = const { Cell::new(0) };
}

/// Number of [`FisConfig::evaluate`] calls made on the current thread.
///
/// Lets callers assert that a code path never consults a fuzzy system.
pub fn evaluation_count() -> u64 {
    EVALUATIONS.with(Cell::get)
}

#[derive(Debug, Error, PartialEq)]
pub enum FisError {
    #[error("unknown input variable `{0}`")]
    UnknownVariable(String),
    #[error("no value given for input variable `{0}`")]
    MissingInput(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid fuzzy system: {0}")]
    Validation(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianMF {
    pub center: f64,
    pub sigma: f64,
}

impl GaussianMF {
    pub fn new(center: f64, sigma: f64) -> Self {
        Self { center, sigma }
    }

    pub fn membership(&self, x: f64) -> f64 {
        let d = x - self.center;
        (-(d * d) / (2.0 * self.sigma * self.sigma)).exp()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinguisticVariable {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<(String, GaussianMF)>,
}

impl LinguisticVariable {
    pub fn new(name: &str, lo: f64, hi: f64) -> Self {
        Self {
            name: name.to_string(),
            lo,
            hi,
            terms: Vec::new(),
        }
    }

    #[must_use]
    pub fn with_term(mut self, label: &str, mf: GaussianMF) -> Self {
        self.terms.push((label.to_string(), mf));
        self
    }

    /// `Low` at the lower end and `High` at the upper end of the range.
    pub fn low_high(name: &str, lo: f64, hi: f64) -> Self {
        let sigma = (hi - lo) * DEFAULT_SIGMA_FRACTION;
        Self::new(name, lo, hi)
            .with_term("Low", GaussianMF::new(lo, sigma))
            .with_term("High", GaussianMF::new(hi, sigma))
    }

    pub fn term(&self, label: &str) -> Option<&GaussianMF> {
        self.terms.iter().find(|(l, _)| l == label).map(|(_, mf)| mf)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    fn validate(&self) -> Result<(), FisError> {
        let fail = |msg: String| Err(FisError::Validation(format!("variable `{}`: {msg}", self.name)));
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return fail(format!("range [{}, {}] is not increasing", self.lo, self.hi));
        }
        if self.terms.is_empty() {
            return fail("has no terms".into());
        }
        for (i, (label, mf)) in self.terms.iter().enumerate() {
            if self.terms[..i].iter().any(|(l, _)| l == label) {
                return fail(format!("duplicate term `{label}`"));
            }
            if !(mf.sigma.is_finite() && mf.sigma > 0.0) {
                return fail(format!("term `{label}` has sigma {} <= 0", mf.sigma));
            }
            if !mf.center.is_finite() {
                return fail(format!("term `{label}` has a non-finite center"));
            }
        }
        Ok(())
    }
}

/// `IF a IS x AND b IS y THEN out IS z`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzyRule {
    pub antecedents: Vec<(String, String)>,
    pub consequent: (String, String),
}

impl FuzzyRule {
    pub fn new(antecedents: &[(&str, &str)], consequent: (&str, &str)) -> Self {
        Self {
            antecedents: antecedents
                .iter()
                .map(|(v, t)| (v.to_string(), t.to_string()))
                .collect(),
            consequent: (consequent.0.to_string(), consequent.1.to_string()),
        }
    }
}

/// A validated Mamdani system with a single output.
#[derive(Clone, Debug, PartialEq)]
pub struct FisConfig {
    name: String,
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: Vec<FuzzyRule>,
    defuzz_grid: usize,
}

/// Crisp output together with the strength each rule fired at.
#[derive(Clone, Debug, PartialEq)]
pub struct Inference {
    pub firing: Vec<f64>,
    pub output: f64,
}

impl FisConfig {
    pub fn new(
        name: &str,
        inputs: Vec<LinguisticVariable>,
        output: LinguisticVariable,
        rules: Vec<FuzzyRule>,
        defuzz_grid: usize,
    ) -> Result<Self, FisError> {
        let config = Self {
            name: name.to_string(),
            inputs,
            output,
            rules,
            defuzz_grid,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), FisError> {
        if self.inputs.is_empty() {
            return Err(FisError::Validation("no input variables".into()));
        }
        if self.rules.is_empty() {
            return Err(FisError::Validation("no rules".into()));
        }
        if self.defuzz_grid < MIN_GRID {
            return Err(FisError::Validation(format!(
                "defuzzification grid {} is below {MIN_GRID}",
                self.defuzz_grid
            )));
        }
        for (i, v) in self.inputs.iter().chain(std::iter::once(&self.output)).enumerate() {
            v.validate()?;
            if self.inputs[..i.min(self.inputs.len())].iter().any(|o| o.name == v.name) {
                return Err(FisError::Validation(format!("duplicate variable `{}`", v.name)));
            }
        }
        for (n, rule) in self.rules.iter().enumerate() {
            let rule_no = n + 1;
            if rule.antecedents.is_empty() {
                return Err(FisError::Validation(format!("rule {rule_no} has no antecedent")));
            }
            for (var, term) in &rule.antecedents {
                let v = self.input(var).ok_or_else(|| {
                    FisError::Validation(format!("rule {rule_no} references unknown input `{var}`"))
                })?;
                if v.term(term).is_none() {
                    return Err(FisError::Validation(format!(
                        "rule {rule_no} references undefined term `{term}` of `{var}`"
                    )));
                }
            }
            let (var, term) = &rule.consequent;
            if var != &self.output.name {
                return Err(FisError::Validation(format!(
                    "rule {rule_no} concludes on `{var}`, not the output `{}`",
                    self.output.name
                )));
            }
            if self.output.term(term).is_none() {
                return Err(FisError::Validation(format!(
                    "rule {rule_no} references undefined term `{term}` of `{var}`"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn defuzz_grid(&self) -> usize {
        self.defuzz_grid
    }

    /// Same system, different defuzzification grid.
    pub fn with_grid(&self, defuzz_grid: usize) -> Result<Self, FisError> {
        Self::new(
            &self.name,
            self.inputs.clone(),
            self.output.clone(),
            self.rules.clone(),
            defuzz_grid,
        )
    }

    pub fn input(&self, name: &str) -> Option<&LinguisticVariable> {
        self.inputs.iter().find(|v| v.name == name)
    }

    /// Crisp output for named inputs; see [`FisConfig::infer`].
    pub fn evaluate(&self, values: &[(&str, f64)]) -> Result<f64, FisError> {
        self.infer(values).map(|inf| inf.output)
    }

    /// Full Mamdani pass. Inputs outside a variable's range are clamped to
    /// it; when no rule fires at all the output-range midpoint is returned.
    pub fn infer(&self, values: &[(&str, f64)]) -> Result<Inference, FisError> {
        EVALUATIONS.with(|c| c.set(c.get() + 1));
        for (name, _) in values {
            if self.input(name).is_none() {
                return Err(FisError::UnknownVariable(name.to_string()));
            }
        }
        let mut crisp = Vec::with_capacity(self.inputs.len());
        for var in &self.inputs {
            let value = values
                .iter()
                .rev()
                .find(|(n, _)| *n == var.name)
                .map(|(_, v)| *v)
                .ok_or_else(|| FisError::MissingInput(var.name.clone()))?;
            crisp.push(var.clamp(value));
        }

        let firing: Vec<f64> = self
            .rules
            .iter()
            .map(|rule| {
                rule.antecedents
                    .iter()
                    .map(|(var, term)| {
                        let idx = self.inputs.iter().position(|v| &v.name == var).unwrap();
                        self.inputs[idx].term(term).unwrap().membership(crisp[idx])
                    })
                    .fold(1.0, f64::min)
            })
            .collect();

        let consequents: Vec<&GaussianMF> = self
            .rules
            .iter()
            .map(|r| self.output.term(&r.consequent.1).unwrap())
            .collect();
        let (lo, hi) = (self.output.lo, self.output.hi);
        let step = (hi - lo) / (self.defuzz_grid - 1) as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..self.defuzz_grid {
            let y = lo + step * i as f64;
            let mu = firing
                .iter()
                .zip(&consequents)
                .map(|(&w, mf)| w.min(mf.membership(y)))
                .fold(0.0, f64::max);
            num += y * mu;
            den += mu;
        }
        let output = if den > 0.0 { num / den } else { 0.5 * (lo + hi) };
        Ok(Inference { firing, output })
    }
}

/// S-Dive system: Entropy [0, 8] and SEC [0, 100] to S-Dive [0, 1].
pub fn fis1_default() -> FisConfig {
    FisConfig::new(
        "FIS1",
        vec![
            LinguisticVariable::low_high("Entropy", 0.0, 8.0),
            LinguisticVariable::low_high("SEC", 0.0, 100.0),
        ],
        LinguisticVariable::low_high("S-Dive", 0.0, 1.0),
        vec![
            FuzzyRule::new(&[("Entropy", "Low"), ("SEC", "High")], ("S-Dive", "Low")),
            FuzzyRule::new(&[("Entropy", "High")], ("S-Dive", "High")),
        ],
        DEFAULT_GRID,
    )
    .expect("built-in FIS1 is valid")
}

/// D-Dive system: UACI, NPCR and SEC (all [0, 100]) to D-Dive [0, 1].
pub fn fis2_default() -> FisConfig {
    FisConfig::new(
        "FIS2",
        vec![
            LinguisticVariable::low_high("UACI", 0.0, 100.0),
            LinguisticVariable::low_high("NPCR", 0.0, 100.0),
            LinguisticVariable::low_high("SEC", 0.0, 100.0),
        ],
        LinguisticVariable::low_high("D-Dive", 0.0, 1.0),
        vec![
            FuzzyRule::new(&[("UACI", "Low"), ("SEC", "High")], ("D-Dive", "Low")),
            FuzzyRule::new(&[("NPCR", "Low"), ("SEC", "High")], ("D-Dive", "Low")),
            FuzzyRule::new(&[("UACI", "High"), ("NPCR", "High")], ("D-Dive", "High")),
        ],
        DEFAULT_GRID,
    )
    .expect("built-in FIS2 is valid")
}
