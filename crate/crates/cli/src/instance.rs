//! Instance files: metric, named coefficients and source tensor, as JSON.

use std::collections::BTreeMap;
use std::fmt;

use rank3eq_core::{Metric, ParameterSet, Rank3Tensor, PARAM_NAMES};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const INSTANCE_FORMAT: &str = "rank3eq-instance/1";

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot parse instance: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format `{0}` (expected `{INSTANCE_FORMAT}`)")]
    Format(String),
    #[error("key `metric`: {0}")]
    Metric(String),
    #[error("key `B`: {0}")]
    Source(String),
    #[error("key `parameters.{0}`: {1}")]
    Parameter(String, &'static str),
}

/// A metric given either by name or as a full 4×4 array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(String),
    Matrix([[f64; 4]; 4]),
}

impl MetricSpec {
    pub fn resolve(&self) -> Result<Metric, InputError> {
        match self {
            MetricSpec::Named(name) => match name.as_str() {
                "euclidean" => Ok(Metric::euclidean()),
                "minkowski" => Ok(Metric::minkowski()),
                other => Err(InputError::Metric(format!(
                    "unknown name `{other}` (expected `euclidean`, `minkowski` or a 4×4 array)"
                ))),
            },
            MetricSpec::Matrix(m) => Metric::new(*m).map_err(|e| InputError::Metric(e.to_string())),
        }
    }
}

/// The source tensor, flat (`16α + 4μ + ν`) or nested `[α][μ][ν]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum SourceSpec {
    Flat(Vec<f64>),
    Nested(Vec<Vec<Vec<f64>>>),
}

impl SourceSpec {
    fn into_tensor(self) -> Result<Rank3Tensor, InputError> {
        let flat: Vec<f64> = match self {
            SourceSpec::Flat(v) => v,
            SourceSpec::Nested(v) => {
                let shape_ok = v.len() == 4
                    && v.iter()
                        .all(|r| r.len() == 4 && r.iter().all(|c| c.len() == 4));
                if !shape_ok {
                    return Err(InputError::Source("nested form must be 4×4×4".into()));
                }
                v.into_iter().flatten().flatten().collect()
            }
        };
        let arr: [f64; 64] = flat.try_into().map_err(|v: Vec<f64>| {
            InputError::Source(format!("expected 64 components, found {}", v.len()))
        })?;
        if arr.iter().any(|x| !x.is_finite()) {
            return Err(InputError::Source("components must be finite".into()));
        }
        Ok(Rank3Tensor(arr))
    }
}

/// Serializes the coefficients in canonical order, all thirty present.
struct Params<'a>(&'a ParameterSet);

impl Serialize for Params<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let flat = self.0.to_flat();
        let mut map = s.serialize_map(Some(flat.len()))?;
        for (name, v) in PARAM_NAMES.iter().zip(flat) {
            map.serialize_entry(name, &v)?;
        }
        map.end()
    }
}

/// Raw map; names are checked after parsing so the error can name the key.
struct RawParams(BTreeMap<String, f64>);

impl<'de> Deserialize<'de> for RawParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RawParams;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from coefficient names to numbers")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> Result<RawParams, A::Error> {
                let mut out = BTreeMap::new();
                while let Some((k, v)) = m.next_entry::<String, f64>()? {
                    if out.insert(k.clone(), v).is_some() {
                        return Err(de::Error::custom(format_args!("duplicate parameter `{k}`")));
                    }
                }
                Ok(RawParams(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    format: String,
    metric: MetricSpec,
    #[serde(default)]
    parameters: Option<RawParams>,
    #[serde(rename = "B")]
    source: SourceSpec,
}

#[derive(Serialize)]
struct OutInstance<'a> {
    format: &'static str,
    metric: &'a MetricSpec,
    parameters: Params<'a>,
    #[serde(rename = "B")]
    source: &'a [f64],
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub metric_spec: MetricSpec,
    pub metric: Metric,
    pub params: ParameterSet,
    pub source: Rank3Tensor,
}

impl InstanceFile {
    pub fn new(
        metric_spec: MetricSpec,
        params: ParameterSet,
        source: Rank3Tensor,
    ) -> Result<Self, InputError> {
        Ok(Self {
            metric: metric_spec.resolve()?,
            metric_spec,
            params,
            source,
        })
    }

    pub fn parse(text: &str) -> Result<Self, InputError> {
        let raw: RawInstance = serde_json::from_str(text)?;
        if raw.format != INSTANCE_FORMAT {
            return Err(InputError::Format(raw.format));
        }
        let mut params = ParameterSet::ZERO;
        for (name, v) in raw.parameters.map(|p| p.0).unwrap_or_default() {
            if !v.is_finite() {
                return Err(InputError::Parameter(name, "value must be finite"));
            }
            if params.set(&name, v).is_err() {
                return Err(InputError::Parameter(name, "unknown coefficient"));
            }
        }
        Self::new(raw.metric, params, raw.source.into_tensor()?)
    }

    /// Canonical form: all thirty coefficients, flat `B`.
    pub fn to_json(&self) -> String {
        let out = OutInstance {
            format: INSTANCE_FORMAT,
            metric: &self.metric_spec,
            parameters: Params(&self.params),
            source: &self.source.0,
        };
        let mut s = serde_json::to_string_pretty(&out).expect("instance serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_line_instance_with_defaults() {
        let mut b = vec![0.0; 64];
        b[6] = 1.0;
        let text = format!(
            r#"{{"format":"{INSTANCE_FORMAT}","metric":"minkowski","parameters":{{"a1":1}},"B":{b:?}}}"#
        );
        let inst = InstanceFile::parse(&text).unwrap();
        assert_eq!(inst.params, ParameterSet::identity());
        assert_eq!(inst.source, Rank3Tensor::basis(0, 1, 2));
        assert_eq!(inst.metric, Metric::minkowski());
    }

    #[test]
    fn nested_source_and_matrix_metric() {
        let nested: Vec<Vec<Vec<f64>>> = (0..4)
            .map(|a| {
                (0..4)
                    .map(|m| (0..4).map(|n| (16 * a + 4 * m + n) as f64).collect())
                    .collect()
            })
            .collect();
        let text = serde_json::json!({
            "format": INSTANCE_FORMAT,
            "metric": [[2.0, 0, 0, 0], [0, 1.0, 0, 0], [0, 0, 1.0, 0], [0, 0, 0, 1.0]],
            "B": nested,
        })
        .to_string();
        let inst = InstanceFile::parse(&text).unwrap();
        assert_eq!(inst.source.get(1, 2, 3), 27.0);
        assert_eq!(inst.params, ParameterSet::ZERO);
        assert_eq!(inst.metric.det(), 2.0);
    }

    #[test]
    fn round_trip_is_identity() {
        let mut p = ParameterSet::random(4, 1.0);
        p.c[2] = 0.1 + 0.2;
        let inst = InstanceFile::new(
            MetricSpec::Named("euclidean".into()),
            p,
            Rank3Tensor::basis(3, 2, 1),
        )
        .unwrap();
        let text = inst.to_json();
        let back = InstanceFile::parse(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn errors_name_the_key() {
        let b = vec![0.0; 64];
        let bad_param = format!(
            r#"{{"format":"{INSTANCE_FORMAT}","metric":"euclidean","parameters":{{"a10":1}},"B":{b:?}}}"#
        );
        assert!(InstanceFile::parse(&bad_param)
            .unwrap_err()
            .to_string()
            .contains("parameters.a10"));

        let extra =
            format!(r#"{{"format":"{INSTANCE_FORMAT}","metric":"euclidean","B":{b:?},"C":1}}"#);
        assert!(InstanceFile::parse(&extra)
            .unwrap_err()
            .to_string()
            .contains("`C`"));

        let short = format!(r#"{{"format":"{INSTANCE_FORMAT}","metric":"euclidean","B":[1,2]}}"#);
        assert!(InstanceFile::parse(&short)
            .unwrap_err()
            .to_string()
            .contains("key `B`"));

        let asym = format!(
            r#"{{"format":"{INSTANCE_FORMAT}","metric":[[1,1,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],"B":{b:?}}}"#
        );
        assert!(InstanceFile::parse(&asym)
            .unwrap_err()
            .to_string()
            .contains("key `metric`"));

        let wrong = format!(r#"{{"format":"v0","metric":"euclidean","B":{b:?}}}"#);
        assert!(matches!(
            InstanceFile::parse(&wrong),
            Err(InputError::Format(_))
        ));

        let named = format!(r#"{{"format":"{INSTANCE_FORMAT}","metric":"lorentz","B":{b:?}}}"#);
        assert!(InstanceFile::parse(&named)
            .unwrap_err()
            .to_string()
            .contains("lorentz"));
    }
}
