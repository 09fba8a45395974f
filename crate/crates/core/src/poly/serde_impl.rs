//! JSON form: `{"nvars": n, "terms": [{"exp": [..], "coef": "p/q"}]}` with
//! terms in descending graded-lex order.

use std::str::FromStr;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::{Exponents, Polynomial};
use crate::scalar::Rat;

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Terms<'a>(&'a Polynomial);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.num_terms()))?;
                for (exp, coef) in self.0.terms().rev() {
                    #[derive(Serialize)]
                    struct Term<'a> {
                        exp: &'a [u32],
                        coef: String,
                    }
                    seq.serialize_element(&Term {
                        exp: &exp.0,
                        coef: coef.to_string(),
                    })?;
                }
                seq.end()
            }
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("nvars", &self.nvars)?;
        map.serialize_entry("terms", &Terms(self))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct TermRepr {
            exp: Vec<u32>,
            coef: String,
        }

        struct PolyVisitor;
        impl<'de> Visitor<'de> for PolyVisitor {
            type Value = Polynomial;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a polynomial object with nvars and terms")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Polynomial, A::Error> {
                let mut nvars: Option<usize> = None;
                let mut terms: Option<Vec<TermRepr>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "nvars" => nvars = Some(map.next_value()?),
                        "terms" => terms = Some(map.next_value()?),
                        other => return Err(de::Error::unknown_field(other, &["nvars", "terms"])),
                    }
                }
                let nvars = nvars.ok_or_else(|| de::Error::missing_field("nvars"))?;
                let terms = terms.ok_or_else(|| de::Error::missing_field("terms"))?;
                let mut p = Polynomial::zero(nvars);
                for t in terms {
                    if t.exp.len() != nvars {
                        return Err(de::Error::custom("exponent vector length != nvars"));
                    }
                    let coef = Rat::from_str(&t.coef)
                        .map_err(|e| de::Error::custom(format!("bad coefficient: {e}")))?;
                    p.add_term(Exponents(t.exp), coef);
                }
                Ok(p)
            }
        }
        deserializer.deserialize_map(PolyVisitor)
    }
}
