//! Built-in polynomial corpus spanning smooth, normal-crossing,
//! isolated-singular, and positive-dimensional-singular zero sets.

use crate::poly::{parse, Polynomial};

pub struct Fixture {
    pub name: &'static str,
    pub nvars: usize,
    pub text: &'static str,
    pub description: &'static str,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "line",
        nvars: 1,
        text: "x1",
        description: "one-dimensional hyperplane weight (classical setting)",
    },
    Fixture {
        name: "cross",
        nvars: 2,
        text: "x1*x2",
        description: "normal crossing of two lines, singular at the origin",
    },
    Fixture {
        name: "circle",
        nvars: 2,
        text: "x1^2+x2^2",
        description: "definite quadratic cone; only real point is the origin",
    },
    Fixture {
        name: "cusp",
        nvars: 2,
        text: "x2^2-x1^3",
        description: "cuspidal cubic, isolated singular point",
    },
    Fixture {
        name: "cubic",
        nvars: 3,
        text: "x1*x2^2+x1*x3^2+x2^3",
        description: "cubic cone singular along the x1 axis",
    },
    Fixture {
        name: "shifted-cusp",
        nvars: 2,
        text: "x2^2-(x1+1)^3",
        description: "inhomogeneous cusp, singular point moved to (-1, 0)",
    },
    Fixture {
        name: "smooth",
        nvars: 2,
        text: "x1+x2^2",
        description: "smooth hypersurface through the origin",
    },
];

pub fn get(name: &str) -> Option<Polynomial> {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .map(|f| parse(f.text, f.nvars).expect("fixtures parse"))
}

pub fn names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse_and_roundtrip() {
        for f in FIXTURES {
            let p = get(f.name).unwrap();
            assert_eq!(p.nvars(), f.nvars);
            let back = parse(&p.to_text(), f.nvars).unwrap();
            assert_eq!(back, p);
        }
        assert!(get("nope").is_none());
    }

    #[test]
    fn homogeneity_split_matches_descriptions() {
        for name in ["cross", "circle", "cusp", "cubic"] {
            let p = get(name).unwrap();
            if name == "cusp" {
                assert!(!p.is_homogeneous());
            } else {
                assert!(p.is_homogeneous(), "{name}");
            }
        }
        assert!(!get("shifted-cusp").unwrap().is_homogeneous());
    }
}
