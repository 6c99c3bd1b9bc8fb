//! Executes a configuration and decides the exit status.

use refsys_core::hardy::{pointer_projector, P1};
use refsys_core::paradox::{pseudo_probability, PARADOX_SETTINGS};
use refsys_core::postulates::{internal_candidates, joint_probability};
use refsys_core::{hermitian_eigensystem, HardyModel, HiddenBranch, Particle, Pointer};

use crate::config::{Command, RunConfig, DEFAULT_ALPHA};
use crate::report::{evaluate_all, Metadata, ReportDocument, RowStatus, Summary, Tolerances};

pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILURE: i32 = 2;
    pub const INVALID_CONFIG: i32 = 3;
    pub const DEGENERATE: i32 = 4;
    pub const IO: i32 = 5;
}

pub fn run(config: &RunConfig) -> ReportDocument {
    run_at(config, chrono::Utc::now().to_rfc3339())
}

/// As [`run`] with a fixed timestamp.
pub fn run_at(config: &RunConfig, timestamp: String) -> ReportDocument {
    let tolerances = Tolerances::from_override(config.tolerance_override);
    let rows = evaluate_all(&config.alpha.points(), tolerances);
    let narrative = match config.command {
        Command::Demo => demo_narrative(DEFAULT_ALPHA).unwrap_or_else(|e| vec![format!("walkthrough failed: {e}")]),
        _ => Vec::new(),
    };
    ReportDocument {
        metadata: Metadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            tolerances,
            timestamp,
        },
        summary: Summary::of(&rows),
        rows,
        narrative,
    }
}

/// Check failures take precedence over degenerate rows.
pub fn exit_status(doc: &ReportDocument) -> i32 {
    if doc.summary.checks_failed > 0 {
        exit::CHECK_FAILURE
    } else if doc.rows.iter().any(|r| r.status == RowStatus::Degenerate) {
        exit::DEGENERATE
    } else {
        exit::OK
    }
}

fn demo_narrative(alpha: f64) -> refsys_core::Result<Vec<String>> {
    let m = HardyModel::new(alpha)?;
    let (a2, b2) = (alpha * alpha, m.beta() * m.beta());
    let mut n = Vec::new();
    n.push(format!(
        "Hardy pair at alpha = {alpha}, beta = {:.6}: alpha|++> - beta|--> on P1 x P2, both devices ready (m0).",
        m.beta()
    ));

    let initial = m.initial_state().reduced(&[P1])?.assume_isolated();
    let c = internal_candidates(&initial)?;
    n.push(format!(
        "1. State of P1 relative to the isolated composite: eigenvalues {:.6}, {:.6}. \
         The internal state of P1 is |+> with probability {a2:.2} or |-> with probability {b2:.2}.",
        c[0].probability, c[1].probability
    ));

    let fin = m.final_state(PARADOX_SETTINGS)?;
    n.push(
        "2. Both devices measure D: |xi_j>|m0> -> |xi_j>|m_j>, completed unitarily on the other pointer states."
            .to_string(),
    );

    let device = fin.reduced(&[Particle::First.device_id()])?;
    let spectrum = hermitian_eigensystem(device.state().as_operator())?.values();
    n.push(format!(
        "3. State of M1: eigenvalues {:.6}, {:.6}, {:.6}. Device M1 alone shows m1 or m2 with these weights.",
        spectrum[0],
        spectrum[1],
        spectrum[2].abs()
    ));

    let pair = fin.reduced(&[Particle::First.particle_id(), Particle::First.device_id()])?.assume_isolated();
    let c = internal_candidates(&pair)?;
    let (plus, minus) = m.branch_states(PARADOX_SETTINGS.first, Particle::First);
    n.push(format!(
        "4. State of P1+M1: candidates with probabilities {:.6}, {:.6}; overlaps with phi+ and phi- are {:.6}, {:.6}. \
         The final P1+M1 state records which initial internal state P1 had.",
        c[0].probability,
        c[1].probability,
        c[0].state.inner(&plus)?.norm(),
        c[1].state.inner(&minus)?.norm()
    ));

    let rho = fin.density();
    let joint = joint_probability(
        &[pointer_projector(Particle::First, Pointer::Two), pointer_projector(Particle::Second, Pointer::Two)],
        &rho,
    )?;
    n.push(format!(
        "5. M1 and M2 are disjoint, so the trace formula gives P(D1=1, D2=1) = {joint:.10} (closed form {:.10}).",
        m.hardy_joint_closed_form()
    ));

    let items = m.verify_items()?;
    for i in &items.items {
        n.push(format!("   item {}: {} -> {:.3e}", i.item, i.description, i.simulated));
    }

    let triple = [
        plus.dyad(),
        pointer_projector(Particle::First, Pointer::Two),
        pointer_projector(Particle::Second, Pointer::Two),
    ];
    let refusal = match joint_probability(&triple, &rho) {
        Err(e) => e.to_string(),
        Ok(p) => format!("accepted with value {p}"),
    };
    n.push(format!("6. P1+M1 overlaps M1, so the joint-probability formula refuses the triple: {refusal}."));

    let p = pseudo_probability(&m, HiddenBranch::Plus)?;
    let q = pseudo_probability(&m, HiddenBranch::Minus)?;
    n.push(format!(
        "7. Evaluated anyway: plus branch {:.10} (negative), minus branch {:.10} (larger than {joint:.10}). \
         Their sum is {:.10}.",
        p.re,
        q.re,
        p.re + q.re
    ));
    n.push("   Neither value is a probability, so the event has no joint probability.".to_string());
    Ok(n)
}
