use crate::verdict::Verdict;
use indexmap::IndexMap;
use serde_json::{json, Map, Value as Json};

/// Scalar cell of a report.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
    List(Vec<Value>),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Int(i) => Json::String(i.to_string()),
            Value::Real(x) => Json::String(fmt_real(*x)),
            Value::Bool(b) => Json::Bool(*b),
            Value::Text(s) => Json::String(s.clone()),
            Value::List(v) => Json::Array(v.iter().map(Value::to_json).collect()),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Real(x) => fmt_real(*x),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.replace(',', ";"),
            Value::List(v) => v.iter().map(Value::to_csv).collect::<Vec<_>>().join(";"),
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

macro_rules! value_from {
    ($($t:ty => $v:ident as $c:ty),*) => {
        $(impl From<$t> for Value {
            fn from(x: $t) -> Self {
                Value::$v(x as $c)
            }
        })*
    };
}
value_from!(i64 => Int as i64, i32 => Int as i64, u32 => Int as i64, u64 => Int as i64, usize => Int as i64, f64 => Real as f64);

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.into())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(v: Vec<T>) -> Self {
        Value::List(v.into_iter().map(Into::into).collect())
    }
}

/// Outcome of one experiment: parameters, a data table, summary and verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub system: String,
    pub params: IndexMap<String, Value>,
    pub seed: u64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: IndexMap<String, Value>,
    pub verdict: Verdict,
}

impl ExperimentReport {
    pub fn new(experiment: &str, system: &str, seed: u64, columns: &[&str]) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            system: system.into(),
            params: IndexMap::new(),
            seed,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
            summary: IndexMap::new(),
            verdict: Verdict::Inconclusive,
        }
    }

    pub fn param(&mut self, k: &str, v: impl Into<Value>) -> &mut Self {
        self.params.insert(k.into(), v.into());
        self
    }

    pub fn set(&mut self, k: &str, v: impl Into<Value>) -> &mut Self {
        self.summary.insert(k.into(), v.into());
        self
    }

    pub fn row(&mut self, r: Vec<Value>) {
        debug_assert_eq!(r.len(), self.columns.len());
        self.rows.push(r);
    }

    /// Appends a line to the `notes` list of the summary.
    pub fn note(&mut self, s: impl Into<String>) {
        let e = self.summary.entry("notes".into()).or_insert(Value::List(vec![]));
        if let Value::List(v) = e {
            v.push(Value::Text(s.into()));
        }
    }

    pub fn get(&self, k: &str) -> Option<&Value> {
        self.summary.get(k)
    }

    pub fn get_f64(&self, k: &str) -> Option<f64> {
        self.get(k).and_then(Value::as_f64)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_json(&self) -> Json {
        let obj = |m: &IndexMap<String, Value>| {
            Json::Object(m.iter().map(|(k, v)| (k.clone(), v.to_json())).collect::<Map<_, _>>())
        };
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                Json::Object(self.columns.iter().zip(r).map(|(c, v)| (c.clone(), v.to_json())).collect::<Map<_, _>>())
            })
            .collect();
        json!({
            "experiment": self.experiment,
            "system": self.system,
            "params": obj(&self.params),
            "seed": self.seed.to_string(),
            "rows": rows,
            "summary": obj(&self.summary),
            "verdict": self.verdict.to_string(),
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    /// The data table as CSV with a header line.
    pub fn rows_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(Value::to_csv).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }
}
