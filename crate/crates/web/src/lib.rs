//! Browser bindings. Each exported function has a plain Rust twin returning
//! `Result<String, String>` so the logic is testable off the browser.

use wasm_bindgen::prelude::*;

use schur_core::schur::{self, SchurContext};
use schur_core::{parse, Flavor};

// keeps the page responsive; the structure table grows like d^6
const MAX_TABLE_D: u32 = 6;
const MAX_D: u32 = 12;

fn context(d: u32, flavor: &str) -> Result<SchurContext, String> {
    if d > MAX_D {
        return Err(format!("d must be at most {MAX_D} in the browser"));
    }
    Ok(SchurContext::new(d, flavor.parse::<Flavor>()?))
}

fn lowered(expr: &str, ctx: &SchurContext) -> Result<schur_core::Element, String> {
    let e = parse(expr).map_err(|e| e.to_string())?;
    Ok(schur::normalize(&e.lower(ctx.flavor, ctx.mode()), ctx))
}

/// Normal form of `expr` in `B_d`, rendered in the `kostant`, `power` or
/// `hbasis` basis.
pub fn normalize_text(expr: &str, d: u32, flavor: &str, basis: &str) -> Result<String, String> {
    let ctx = context(d, flavor)?;
    let x = lowered(expr, &ctx)?;
    match basis {
        "kostant" => Ok(x.to_string()),
        "power" => Ok(schur::to_power_basis(&x, &ctx).to_string()),
        "hbasis" => Ok(schur::to_h_basis(&x, &ctx).to_string()),
        other => Err(format!("unknown basis `{other}`")),
    }
}

pub fn minpoly_text(expr: &str, d: u32, flavor: &str) -> Result<String, String> {
    let ctx = context(d, flavor)?;
    let x = lowered(expr, &ctx)?;
    Ok(schur::min_poly(&x, &ctx).to_string())
}

/// Structure table as JSON, with an extra `labels` array of rendered basis
/// monomials for the heatmap axes.
pub fn table_json(d: u32, flavor: &str) -> Result<String, String> {
    if d > MAX_TABLE_D {
        return Err(format!("tables are limited to d <= {MAX_TABLE_D} in the browser"));
    }
    let ctx = context(d, flavor)?;
    let table = schur::structure_constants(&ctx);
    let mut v: serde_json::Value = serde_json::from_str(&table.to_json()).map_err(|e| e.to_string())?;
    let labels: Vec<String> = table
        .basis
        .iter()
        .map(|m| {
            let s = m.render(ctx.flavor);
            if s.is_empty() { "1".to_string() } else { s }
        })
        .collect();
    v["labels"] = serde_json::json!(labels);
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn normalize(expr: &str, d: u32, flavor: &str, basis: &str) -> Result<String, JsValue> {
    normalize_text(expr, d, flavor, basis).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn minpoly(expr: &str, d: u32, flavor: &str) -> Result<String, JsValue> {
    minpoly_text(expr, d, flavor).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn structure_table(d: u32, flavor: &str) -> Result<String, JsValue> {
    table_json(d, flavor).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn dimension(d: u32) -> u32 {
    schur::dimension(d) as u32
}
