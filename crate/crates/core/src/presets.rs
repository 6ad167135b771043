//! Named systems shipped with the toolkit.

use crate::error::{Error, Result};
use crate::sl2::{parse_rational, ExactSl2, GaussianRational, Sl2, C64};
use crate::symbolic::System;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PresetInfo {
    pub name: &'static str,
    pub exact: bool,
    pub description: &'static str,
}

const PRESETS: [PresetInfo; 5] = [
    PresetInfo { name: "sanov", exact: true, description: "[[1,2],[0,1]], [[1,0],[2,1]]; fixes the real circle" },
    PresetInfo {
        name: "twist",
        exact: false,
        description: "sanov generators and diag(e^{i pi/7}, e^{-i pi/7}); passes all checks",
    },
    PresetInfo {
        name: "discrete-gaussian",
        exact: true,
        description: "[[1,1+i],[0,1]], [[1,0],[1-i,1]] in SL(2,Z[i])",
    },
    PresetInfo { name: "inverse-pair", exact: true, description: "diag(2,1/2), diag(1/2,2); collisions" },
    PresetInfo { name: "su2-control", exact: true, description: "two special unitary elements; bounded" },
];

pub fn list_presets() -> &'static [PresetInfo] {
    &PRESETS
}

fn q(s: &str) -> GaussianRational {
    GaussianRational::real(parse_rational(s).expect("literal"))
}

fn gq(re: &str, im: &str) -> GaussianRational {
    GaussianRational::new(parse_rational(re).expect("literal"), parse_rational(im).expect("literal"))
}

fn exact(entries: [GaussianRational; 4], index: usize) -> ExactSl2 {
    ExactSl2::new(entries, index).expect("preset determinant")
}

pub fn preset(name: &str) -> Result<System> {
    match name {
        "sanov" => System::uniform_exact(
            "sanov",
            vec![ExactSl2::from_ints(1, 2, 0, 1)?, ExactSl2::from_ints(1, 0, 2, 1)?],
        ),
        "twist" => {
            let r = C64::from_polar(1.0, PI / 7.0);
            System::uniform(
                "twist",
                vec![
                    Sl2::real(1.0, 2.0, 0.0, 1.0)?,
                    Sl2::real(1.0, 0.0, 2.0, 1.0)?,
                    Sl2::new(r, C64::new(0.0, 0.0), C64::new(0.0, 0.0), r.conj(), 2)?,
                ],
            )
        }
        "discrete-gaussian" => System::uniform_exact(
            "discrete-gaussian",
            vec![
                exact([q("1"), gq("1", "1"), q("0"), q("1")], 0),
                exact([q("1"), q("0"), gq("1", "-1"), q("1")], 1),
            ],
        ),
        "inverse-pair" => System::uniform_exact(
            "inverse-pair",
            vec![exact([q("2"), q("0"), q("0"), q("1/2")], 0), exact([q("1/2"), q("0"), q("0"), q("2")], 1)],
        ),
        "su2-control" => System::uniform_exact(
            "su2-control",
            vec![
                exact([q("3/5"), gq("0", "-4/5"), gq("0", "-4/5"), q("3/5")], 0),
                exact([gq("2/3", "1/3"), gq("0", "2/3"), gq("0", "2/3"), gq("2/3", "-1/3")], 1),
            ],
        ),
        _ => Err(Error::InvalidSystem(format!("unknown preset '{name}'"))),
    }
}
