use super::PizzaInstance;
use crate::error::Result;

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<PizzaInstance> {
    let raw: PizzaInstance = serde_json::from_str(text)?;
    PizzaInstance::new(raw.masses)
}

/// Canonical form: colors ascending, lowest-terms `"p/q"` numerals, two-space indent.
pub fn serialize_instance(inst: &PizzaInstance) -> String {
    let mut canon = inst.clone();
    canon.masses.sort_by_key(|m| m.color);
    let mut s = serde_json::to_string_pretty(&canon).expect("instance serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{frac, int};

    const HOLED: &str = r#"{"masses":[
        {"color":1,"polygons":[{"weight":"1/3","outer":[["0","0"],["1","0"],["0","1"]]}]},
        {"color":0,"polygons":[{"weight":1,"outer":[[0,0],[4,0],[4,4],[0,4]],
                                "holes":[[["1","1"],["1","3"],["3","3"],["3","1"]]]}]}]}"#;

    #[test]
    fn parses_and_sorts() {
        let inst = parse_instance(HOLED).unwrap();
        assert_eq!(inst.masses[0].color, 0);
        assert_eq!(inst.masses[0].polygons[0].area(), int(12));
        assert_eq!(inst.masses[1].polygons[0].weight, frac(1, 3));
    }

    #[test]
    fn round_trip_is_exact_and_stable() {
        let inst = parse_instance(HOLED).unwrap();
        let text = serialize_instance(&inst);
        assert!(text.contains("\"1/3\""));
        let again = parse_instance(&text).unwrap();
        assert_eq!(again, inst);
        assert_eq!(serialize_instance(&again), text);
    }

    #[test]
    fn decimals_are_exact() {
        let text = r#"{"masses":[{"color":0,"polygons":[{"weight":"0.1",
            "outer":[["0","0"],["0.5","0"],["0.5","0.25"],["0","0.25"]]}]}]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.masses[0].total(), frac(1, 80));
    }

    #[test]
    fn clockwise_square_is_rejected() {
        let text = r#"{"masses":[{"color":0,"polygons":[{"weight":"1",
            "outer":[["0","0"],["0","1"],["1","1"],["1","0"]]}]}]}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("orientation: expected solid (CCW)"), "{err}");
    }

    #[test]
    fn malformed_numeral() {
        let text = r#"{"masses":[{"color":0,"polygons":[{"weight":"1/0",
            "outer":[["0","0"],["1","0"],["0","1"]]}]}]}"#;
        assert!(parse_instance(text).is_err());
    }
}
