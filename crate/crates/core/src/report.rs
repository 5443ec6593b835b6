//! Run reports: self-contained JSON artifacts describing what a
//! separation run was given, what it produced, and how the output was
//! checked. Reports are deterministic byte for byte: all maps are
//! ordered, all numbers exact, and the resolved configuration and input
//! digests are embedded so a run can be reproduced and re-verified from
//! the report alone.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cgc::{Cgc, CgcCheck};
use crate::dyck::{DyckCheck, DyckOutcome, SeparationWitness};
use crate::preiss::{FireEvent, PreissCheck, PreissOutcome, PreissRun};
use crate::spc::{spc_to_borel, Borel, Spc};

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

pub fn digest_input(name: &str, bytes: &[u8]) -> InputDigest {
    InputDigest { name: name.to_string(), sha256: sha256_hex(bytes) }
}

/// Pretty JSON with a trailing newline; the single rendering used for
/// every persisted report.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports are serializable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyckConfig {
    pub verify_depth: usize,
    pub max_states: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub x: String,
    pub gamma_x: String,
    pub y: String,
    pub gamma_y: String,
}

impl From<&SeparationWitness> for WitnessReport {
    fn from(w: &SeparationWitness) -> Self {
        WitnessReport {
            x: w.x.to_string(),
            gamma_x: w.gamma_x.to_string(),
            y: w.y.to_string(),
            gamma_y: w.gamma_y.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyckVerification {
    pub depth: usize,
    pub points_checked: usize,
    pub first_members: usize,
    pub second_members: usize,
    pub violations: Vec<String>,
}

impl From<&DyckCheck> for DyckVerification {
    fn from(c: &DyckCheck) -> Self {
        DyckVerification {
            depth: c.depth,
            points_checked: c.points_checked,
            first_members: c.first_members,
            second_members: c.second_members,
            violations: c
                .violations
                .iter()
                .map(|v| {
                    format!(
                        "{}: first {}, second {}, separator {}",
                        v.point, v.in_first, v.in_second, v.in_separator
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyckReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub config: DyckConfig,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<Spc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub borel_code: Option<Borel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<DyckVerification>,
}

pub fn dyck_report(
    inputs: Vec<InputDigest>,
    config: DyckConfig,
    outcome: &DyckOutcome,
    verification: Option<&DyckCheck>,
) -> DyckReport {
    match outcome {
        DyckOutcome::Separator(code) => DyckReport {
            command: "dyck separate".into(),
            inputs,
            config,
            outcome: "code-emitted".into(),
            code: Some((**code).clone()),
            borel_code: Some((*spc_to_borel(code)).clone()),
            witness: None,
            verification: verification.map(DyckVerification::from),
        },
        DyckOutcome::Witness(w) => DyckReport {
            command: "dyck separate".into(),
            inputs,
            config,
            outcome: "witness-found".into(),
            code: None,
            borel_code: None,
            witness: Some(WitnessReport::from(w)),
            verification: None,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreissConfig {
    pub cubes: u64,
    pub fuel: u64,
    pub grid_step_denominator: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreissReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub config: PreissConfig,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<Cgc>,
    pub explored: Vec<u64>,
    pub fires: Vec<FireEvent>,
    pub guarantee_cube: u64,
    pub contract: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_check: Option<CgcCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<PreissCheck>,
}

pub fn preiss_report(
    inputs: Vec<InputDigest>,
    config: PreissConfig,
    run: &PreissRun,
    code_check: Option<CgcCheck>,
    verification: Option<PreissCheck>,
) -> PreissReport {
    let guarantee = run.guarantee_radius();
    let contract = format!(
        "the emitted code contains every point the scheme approximates to its full depth \
         within [-{guarantee},{guarantee}]^N and excludes the checked address limits of the \
         second set; cube indices at and beyond {} and letters beyond the declared alphabets \
         are not examined",
        run.cubes
    );
    match &run.outcome {
        PreissOutcome::Emitted(code) => PreissReport {
            command: "preiss separate".into(),
            inputs,
            config,
            outcome: "code-emitted".into(),
            reason: None,
            code: Some((**code).clone()),
            explored: run.explored.clone(),
            fires: run.fires.clone(),
            guarantee_cube: guarantee,
            contract,
            code_check,
            verification,
        },
        PreissOutcome::Exhausted { reason } => PreissReport {
            command: "preiss separate".into(),
            inputs,
            config,
            outcome: "fuel-exhausted".into(),
            reason: Some(reason.clone()),
            code: None,
            explored: run.explored.clone(),
            fires: run.fires.clone(),
            guarantee_cube: guarantee,
            contract,
            code_check: None,
            verification: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_frozen_values() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn dyck_report_shapes() {
        let config = DyckConfig { verify_depth: 3, max_states: 64 };
        let sep = DyckOutcome::Separator(Spc::leaf_coord(0));
        let r = dyck_report(vec![digest_input("t", b"x")], config.clone(), &sep, None);
        assert_eq!(r.outcome, "code-emitted");
        assert!(r.code.is_some() && r.borel_code.is_some() && r.witness.is_none());

        let wit = DyckOutcome::Witness(crate::dyck::SeparationWitness {
            x: crate::point::UpPoint::zero(),
            gamma_x: crate::point::UpPoint::zero(),
            y: crate::point::UpPoint::zero(),
            gamma_y: crate::point::UpPoint::zero(),
        });
        let r = dyck_report(vec![], config, &wit, None);
        assert_eq!(r.outcome, "witness-found");
        assert!(r.code.is_none() && r.witness.is_some());
        let text = to_canonical_json(&r);
        let back: DyckReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(to_canonical_json(&back), text);
    }

    #[test]
    fn preiss_report_roundtrip() {
        let run = PreissRun {
            outcome: PreissOutcome::Exhausted { reason: "fuel exhausted".into() },
            explored: vec![2, 1],
            fires: vec![],
            cubes: 2,
        };
        let config = PreissConfig { cubes: 2, fuel: 1, grid_step_denominator: 4 };
        let r = preiss_report(vec![], config, &run, None, None);
        assert_eq!(r.outcome, "fuel-exhausted");
        assert_eq!(r.guarantee_cube, 1);
        assert!(r.code.is_none());
        assert!(r.contract.contains("[-1,1]"));
        let text = to_canonical_json(&r);
        let back: PreissReport = serde_json::from_str(&text).unwrap();
        assert_eq!(to_canonical_json(&back), text);
    }
}
