//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes and returns plain strings: scenarios travel in the
//! scenario text format and results come back as JSON. Failures become
//! `{"error": "..."}` so the page never has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use linksched::baselines::{run_baseline, BaselineKind};
use linksched::centralized::app_schedule;
use linksched::distributed::{run_distributed, theorem3_bound, ProtocolParams};
use linksched::feasibility::{check_sinr, throughput, Schedule};
use linksched::scenario::{format_scenario, generate_scenario, parse_scenario, ScenarioConfig};
use linksched::NetworkInstance;

/// Upper bound on simulated slots so the page stays responsive.
const MAX_DEMO_SLOTS: usize = 5_000;

fn respond(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn geometry(inst: &NetworkInstance) -> Value {
    json!({
        "nodes": inst.nodes().iter().map(|n| json!([n.x, n.y])).collect::<Vec<_>>(),
        "links": inst.links().iter().map(|l| json!([l.sender, l.receiver])).collect::<Vec<_>>(),
    })
}

/// Per-slot link lists with the SINR each link sees in its slot.
fn slots_json(inst: &NetworkInstance, schedule: &Schedule) -> Value {
    let slots: Vec<Value> = schedule
        .slots()
        .iter()
        .map(|slot| {
            let members: Vec<usize> = slot.iter().copied().collect();
            members
                .iter()
                .map(|&l| {
                    let others: Vec<usize> = members.iter().copied().filter(|&k| k != l).collect();
                    let sinr = inst.sinr_at_receiver(l, &others).unwrap_or(0.0);
                    json!({ "link": l, "sinr": sinr, "ok": sinr >= inst.radio().beta })
                })
                .collect()
        })
        .collect();
    Value::Array(slots)
}

fn load(scenario: &str) -> Result<NetworkInstance, String> {
    parse_scenario(scenario).map_err(|e| e.to_string())
}

/// Random scenario: `pairs` links in a square of side `area_side`.
#[wasm_bindgen]
pub fn generate(pairs: usize, area_side: f64, seed: u64) -> String {
    respond((|| {
        let cfg = ScenarioConfig {
            pairs,
            area_side,
            ..Default::default()
        };
        let inst = generate_scenario(&cfg, seed).map_err(|e| e.to_string())?;
        Ok(json!({ "scenario": format_scenario(&inst), "geometry": geometry(&inst) }))
    })())
}

/// Centralized schedule next to the three baselines on the same frame.
#[wasm_bindgen]
pub fn schedule(scenario: &str, frame_length: usize, seed: u64) -> String {
    respond((|| {
        let inst = load(scenario)?;
        let app = app_schedule(&inst, frame_length, seed).map_err(|e| e.to_string())?;
        let mut baselines = serde_json::Map::new();
        for kind in [
            BaselineKind::ProtocolModel,
            BaselineKind::PhysicalGreedy,
            BaselineKind::PhysicalConflictGraph,
        ] {
            let b = run_baseline(kind, &inst, 2.5, frame_length).map_err(|e| e.to_string())?;
            let witnesses = check_sinr(&inst, &b.schedule)
                .map_err(|e| e.to_string())?
                .len();
            baselines.insert(
                kind.short_name().to_string(),
                json!({
                    "throughput": throughput(&inst, &b.schedule).map_err(|e| e.to_string())?,
                    "uncovered": b.uncovered,
                    "sinr_violations": witnesses,
                    "slots": slots_json(&inst, &b.schedule),
                }),
            );
        }
        Ok(json!({
            "geometry": geometry(&inst),
            "beta": inst.radio().beta,
            "app": {
                "throughput": app.throughput(),
                "lp_bound": app.a_hat,
                "delta_ratio": app.delta_ratio(),
                "uncovered": app.uncovered,
                "slots": slots_json(&inst, &app.schedule),
            },
            "baselines": baselines,
        }))
    })())
}

/// Distributed protocol run until every link has completed once.
#[wasm_bindgen]
pub fn simulate(scenario: &str, seed: u64) -> String {
    respond((|| {
        let inst = load(scenario)?;
        let params = ProtocolParams::for_instance(&inst).map_err(|e| e.to_string())?;
        let budget = (inst.num_links() as f64 * theorem3_bound(&inst, &params)).ceil() as usize;
        let trace = run_distributed(&inst, &params, budget.min(MAX_DEMO_SLOTS), seed)
            .map_err(|e| e.to_string())?;
        let slots: Vec<Value> = trace
            .slots
            .iter()
            .map(|s| {
                json!({
                    "sensing": s.sensing.iter().map(|c| json!({
                        "sender": c.sender, "link": c.link, "t_s": c.t_s, "busy": c.sensed_busy,
                    })).collect::<Vec<_>>(),
                    "granted": s.granted,
                    "denied": s.denied,
                    "completed": s.completed.iter().map(|&(l, sinr)| json!({ "link": l, "sinr": sinr })).collect::<Vec<_>>(),
                })
            })
            .collect();
        Ok(json!({
            "geometry": geometry(&inst),
            "sensing_range": params.sensing_range_plane(),
            "rho": params.rho,
            "diversity": params.diversity_k,
            "complete": trace.complete,
            "slots_used": trace.slots_used,
            "slots": slots,
        }))
    })())
}
