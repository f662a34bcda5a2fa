//! Box overlap measures.

use crate::types::BoundingBox;

/// Area of `a ∩ b`; touching edges give zero.
pub fn intersection_area(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let w = a.right().min(b.right()) - a.x.max(b.x);
    let h = a.bottom().min(b.bottom()) - a.y.max(b.y);
    if w <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    w * h
}

/// Intersection over union.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = intersection_area(a, b);
    if inter == 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Fraction of the head-shoulder box covered by the whole-body box,
/// `|wb ∩ hs| / |hs|`. Not symmetric.
pub fn containment_iou(wb: &BoundingBox, hs: &BoundingBox) -> f64 {
    let inter = intersection_area(wb, hs);
    if inter == 0.0 {
        return 0.0;
    }
    (inter / hs.area()).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Counts covered unit cells on an integer grid; exact for integer boxes.
    fn raster_area(boxes: &[&BoundingBox], lo: i64, hi: i64) -> (u64, u64) {
        let covers = |b: &BoundingBox, px: i64, py: i64| {
            let (cx, cy) = (px as f64 + 0.5, py as f64 + 0.5);
            cx > b.x && cx < b.right() && cy > b.y && cy < b.bottom()
        };
        let (mut inter, mut union) = (0, 0);
        for py in lo..hi {
            for px in lo..hi {
                let hits = boxes.iter().filter(|b| covers(b, px, py)).count();
                if hits == boxes.len() {
                    inter += 1;
                }
                if hits > 0 {
                    union += 1;
                }
            }
        }
        (inter, union)
    }

    #[test]
    fn identical_boxes() {
        let a = BoundingBox::new(3.0, 4.0, 10.0, 20.0);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(containment_iou(&a, &a), 1.0);
    }

    #[test]
    fn disjoint_and_touching_boxes() {
        let a = BoundingBox::new(0.0, 0.0, 2.0, 2.0);
        let b = BoundingBox::new(5.0, 5.0, 2.0, 2.0);
        let touching = BoundingBox::new(2.0, 0.0, 2.0, 2.0);
        assert_eq!(iou(&a, &b), 0.0);
        assert_eq!(iou(&a, &touching), 0.0);
        assert_eq!(containment_iou(&a, &b), 0.0);
    }

    #[test]
    fn one_seventh_overlap_matches_raster() {
        let a = BoundingBox::new(0.0, 0.0, 2.0, 2.0);
        let b = BoundingBox::new(1.0, 1.0, 2.0, 2.0);
        let (inter, union) = raster_area(&[&a, &b], -1, 5);
        assert_eq!((inter, union), (1, 7));
        assert!((iou(&a, &b) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn half_containment_matches_raster() {
        let wb = BoundingBox::new(0.0, 0.0, 4.0, 4.0);
        let hs = BoundingBox::new(2.0, 0.0, 4.0, 2.0);
        let (inter, _) = raster_area(&[&wb, &hs], -1, 8);
        let (hs_area, _) = raster_area(&[&hs], -1, 8);
        assert_eq!((inter, hs_area), (4, 8));
        assert_eq!(containment_iou(&wb, &hs), 0.5);
    }

    fn int_box() -> impl Strategy<Value = BoundingBox> {
        (0i32..12, 0i32..12, 1i32..8, 1i32..8)
            .prop_map(|(x, y, w, h)| BoundingBox::new(x as f64, y as f64, w as f64, h as f64))
    }

    fn real_box() -> impl Strategy<Value = BoundingBox> {
        (-50.0f64..50.0, -50.0f64..50.0, 0.1f64..40.0, 0.1f64..40.0)
            .prop_map(|(x, y, w, h)| BoundingBox::new(x, y, w, h))
    }

    proptest! {
        #[test]
        fn iou_agrees_with_raster_on_integer_boxes(a in int_box(), b in int_box()) {
            let (inter, union) = raster_area(&[&a, &b], 0, 20);
            let expected = inter as f64 / union as f64;
            prop_assert!((iou(&a, &b) - expected).abs() < 1e-12);
            let (hs_area, _) = raster_area(&[&b], 0, 20);
            prop_assert!((containment_iou(&a, &b) - inter as f64 / hs_area as f64).abs() < 1e-12);
        }

        #[test]
        fn measures_are_bounded_and_ordered(a in real_box(), b in real_box()) {
            let v = iou(&a, &b);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!((v - iou(&b, &a)).abs() < 1e-15);
            prop_assert!(containment_iou(&a, &b) >= v - 1e-15);
            prop_assert!((iou(&a, &a) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn translation_invariance(a in int_box(), b in int_box(), dx in -100i32..100, dy in -100i32..100) {
            let (ta, tb) = (a.translated(dx as f64, dy as f64), b.translated(dx as f64, dy as f64));
            prop_assert!((iou(&a, &b) - iou(&ta, &tb)).abs() < 1e-12);
            prop_assert!((containment_iou(&a, &b) - containment_iou(&ta, &tb)).abs() < 1e-12);
        }

        #[test]
        fn contained_box_has_full_containment(outer in real_box(), fx in 0.0f64..1.0, fy in 0.0f64..1.0, fw in 0.01f64..1.0, fh in 0.01f64..1.0) {
            let w = outer.w * fw * (1.0 - fx);
            let h = outer.h * fh * (1.0 - fy);
            let inner = BoundingBox::new(outer.x + outer.w * fx * (1.0 - fw), outer.y + outer.h * fy * (1.0 - fh), w, h);
            prop_assume!(outer.contains(&inner) && w > 0.0 && h > 0.0);
            prop_assert!((containment_iou(&outer, &inner) - 1.0).abs() < 1e-9);
        }
    }
}
