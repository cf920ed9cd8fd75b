use crate::document::{DocValue, Document, Object};

use super::UnitTable;

/// Rewrite DATA columns and COMMON fields whose unit has a rule: the unit
/// becomes the rule's target and every number is multiplied by its factor.
/// Missing values and units without a rule are left alone.
pub fn standardize_units(mut doc: Document, table: &UnitTable) -> Document {
    for (key, value) in doc.as_object_mut().iter_mut() {
        let Some(block) = value.as_object_mut() else { continue };
        if key == "DATA" {
            standardize_table(block, table);
        } else if key.starts_with("COMMON") {
            standardize_common(block, table);
        }
    }
    doc
}

fn standardize_table(data: &mut Object, table: &UnitTable) {
    let Some(units) = data.get("UNIT").and_then(DocValue::as_array).cloned() else {
        return;
    };
    let mut new_units = units.clone();
    if let Some(columns) = data.get_mut("TABLE").and_then(DocValue::as_object_mut) {
        // columns line up with UNIT by position
        for ((unit, new_unit), column) in units.iter().zip(new_units.iter_mut()).zip(columns.values_mut()) {
            let Some(rule) = unit.as_str().and_then(|u| table.rule_for(u)) else { continue };
            if let Some(cells) = column.as_array_mut() {
                cells.iter_mut().for_each(|cell| scale(cell, rule.factor));
            }
            *new_unit = DocValue::String(rule.target);
        }
    }
    data.insert("UNIT", new_units);
}

fn standardize_common(common: &mut Object, table: &UnitTable) {
    let Some(units) = common.get("UNIT").and_then(DocValue::as_array).cloned() else {
        return;
    };
    let mut new_units = units.clone();
    for (i, (unit, new_unit)) in units.iter().zip(new_units.iter_mut()).enumerate() {
        let Some(rule) = unit.as_str().and_then(|u| table.rule_for(u)) else { continue };
        if let Some(cell) = common.get_mut("VALUE").and_then(DocValue::as_array_mut).and_then(|v| v.get_mut(i)) {
            scale(cell, rule.factor);
        }
        *new_unit = DocValue::String(rule.target);
    }
    common.insert("UNIT", new_units);
}

fn scale(cell: &mut DocValue, factor: f64) {
    if let DocValue::Number(n) = cell {
        *cell = DocValue::number(*n * factor);
    }
}
