//! Serde adapters writing big integers as bare JSON numbers.
//!
//! Output is a decimal JSON number of any length (serde_json's
//! `arbitrary_precision`); input accepts either a JSON number or a decimal
//! string.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Number, Value};

pub fn to_value(v: &BigInt) -> Value {
    Value::Number(Number::from_str(&v.to_string()).expect("a decimal integer is a JSON number"))
}

pub fn from_value(v: &Value) -> Result<BigInt, String> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        other => return Err(format!("expected an integer, found {other}")),
    };
    BigInt::from_str(&text).map_err(|_| format!("`{text}` is not an integer"))
}

pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    to_value(v).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    from_value(&Value::deserialize(d)?).map_err(D::Error::custom)
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_value).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Value>::deserialize(d)?.iter().map(|v| from_value(v).map_err(D::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "crate::json_int")]
        x: BigInt,
        #[serde(with = "crate::json_int::vec")]
        xs: Vec<BigInt>,
    }

    #[test]
    fn huge_values_stay_exact() {
        let big: BigInt = BigInt::from(2).pow(200) + 1;
        let h = Holder { x: big.clone(), xs: vec![-big.clone(), 3.into()] };
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(text, format!(r#"{{"x":{big},"xs":[-{big},3]}}"#));
        assert_eq!(serde_json::from_str::<Holder>(&text).unwrap(), h);
        let quoted: Holder = serde_json::from_str(r#"{"x":"12","xs":["-4"]}"#).unwrap();
        assert_eq!(quoted.x, 12.into());
        assert!(serde_json::from_str::<Holder>(r#"{"x":1.5,"xs":[]}"#).is_err());
    }
}
