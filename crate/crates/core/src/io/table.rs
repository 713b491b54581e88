use crate::model::FamilyModel;

const HEADER: [&str; 5] = ["Variant", "Values", "Relation", "Applicable Area", "Dependency"];

/// Renders the model as a fixed-column text table, one row per variant.
pub fn render_table(model: &FamilyModel) -> String {
    let rows: Vec<[String; 5]> = model
        .variants
        .iter()
        .map(|variant| {
            let values: Vec<String> = variant
                .values
                .iter()
                .map(|v| {
                    if v.depends_on.is_empty() {
                        format!("{} {}", v.id, v.name)
                    } else {
                        let deps: Vec<String> = v.depends_on.iter().map(ToString::to_string).collect();
                        format!("{} {} (needs {})", v.id, v.name, deps.join(", "))
                    }
                })
                .collect();
            let areas = if variant.applies_everywhere() {
                "All".to_owned()
            } else {
                let names: Vec<&str> = variant.applicable_areas.iter().map(|a| a.as_str()).collect();
                names.join(", ")
            };
            let deps = if variant.depends_on.is_empty() {
                "None".to_owned()
            } else {
                let deps: Vec<String> = variant.depends_on.iter().map(ToString::to_string).collect();
                deps.join(", ")
            };
            [
                format!("{}. {}", variant.id, variant.name),
                values.join("; "),
                variant.relation.to_string(),
                areas,
                deps,
            ]
        })
        .collect();

    let mut widths = HEADER.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[&str]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let mut out = padded.join(" | ").trim_end().to_owned();
        out.push('\n');
        out
    };

    let mut out = line(&HEADER);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&rule.join("-+-"));
    out.push('\n');
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        out.push_str(&line(&cells));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::hall_booking;

    fn cells(line: &str) -> Vec<String> {
        line.split(" | ").map(|c| c.trim().to_owned()).collect()
    }

    #[test]
    fn hall_booking_rows() {
        let text = render_table(&hall_booking());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(cells(lines[0]), HEADER);
        assert_eq!(lines.len(), 2 + 5);
        let v3 = cells(lines[2 + 2]);
        assert_eq!(v3[0], "V3. Block Reservation");
        assert_eq!(v3[1], "V3.1 Multiple Room; V3.2 Multiple Time");
        assert_eq!(v3[4], "V1.2");
        let v5 = cells(lines[2 + 4]);
        assert_eq!(v5[3], "NonAcademic");
        assert_eq!(v5[4], "V2.3, V1.2");
        assert_eq!(cells(lines[2])[2], "Alternative");
        assert_eq!(cells(lines[2])[3], "All");
    }

    #[test]
    fn no_dependency_cell_reads_none() {
        let mut model = hall_booking();
        model.variants.truncate(1);
        let text = render_table(&model);
        assert_eq!(cells(text.lines().nth(2).unwrap())[4], "None");
    }

    #[test]
    fn rows_follow_model_order() {
        let mut model = hall_booking();
        model.variants.reverse();
        let text = render_table(&model);
        let firsts: Vec<String> = text.lines().skip(2).map(|l| cells(l)[0].clone()).collect();
        let expected: Vec<String> = model.variants.iter().map(|v| format!("{}. {}", v.id, v.name)).collect();
        assert_eq!(firsts, expected);
        assert_eq!(render_table(&model), text);
    }
}
