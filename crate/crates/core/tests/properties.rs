use std::collections::BTreeSet;

use livingglobe_core::atlas::{assign_grey_levels, HIGHLIGHT_LEVEL, SEA_LEVEL};
use livingglobe_core::explore::{
    effective_extent, set_year, suggest_countries, visible_countries, Channel, ExploreState,
    FilterState, Interval, MAX_SUGGESTIONS,
};
use livingglobe_core::mapping::{
    bar_height, build_frame, normalize, scale_color, ColorScale, MappingConfig, NormalizedValue,
};
use livingglobe_core::store::{
    keys, CountryRecord, Extent, GeoPoint, Geography, IndicatorTable, YearRange,
};
use livingglobe_core::Iso3;
use proptest::prelude::*;

const FIRST: i32 = 1980;
const LAST: i32 = 1984;
const MAPPED: [&str; 3] = [
    keys::TOTAL_POPULATION,
    keys::POPULATION_DENSITY,
    keys::POPULATION_GROWTH,
];

fn code(i: usize) -> Iso3 {
    let b = [b'A' + (i / 676) as u8, b'A' + (i / 26 % 26) as u8, b'A' + (i % 26) as u8];
    Iso3::new(std::str::from_utf8(&b).unwrap()).unwrap()
}

fn cell() -> impl Strategy<Value = Option<f64>> {
    prop_oneof![1 => Just(None), 4 => (-1e3f64..1e6).prop_map(Some)]
}

/// Cells indexed `[country][indicator][year]`.
fn cells() -> impl Strategy<Value = Vec<Vec<Vec<Option<f64>>>>> {
    let years = (LAST - FIRST + 1) as usize;
    prop::collection::vec(
        prop::collection::vec(prop::collection::vec(cell(), years), MAPPED.len()),
        1..25,
    )
}

fn table_from(cells: &[Vec<Vec<Option<f64>>>]) -> IndicatorTable {
    let mut t = IndicatorTable::new(YearRange::new(FIRST, LAST).unwrap());
    for (i, per_indicator) in cells.iter().enumerate() {
        for (key, series) in MAPPED.iter().zip(per_indicator) {
            t.insert_series(key, code(i), &format!("Country {i}"), series.clone())
                .unwrap();
        }
    }
    t
}

fn interval() -> impl Strategy<Value = Option<Interval>> {
    prop_oneof![
        1 => Just(None),
        2 => (-1e3f64..1e6, -1e3f64..1e6)
            .prop_map(|(a, b)| Some(Interval::new(a.min(b), a.max(b)).unwrap())),
    ]
}

fn filters() -> impl Strategy<Value = FilterState> {
    (interval(), interval(), interval(), any::<bool>()).prop_map(|(h, b, c, sticky)| {
        let mut f = FilterState::default()
            .with(Channel::Height, h)
            .with(Channel::BarColor, b)
            .with(Channel::CountryColor, c);
        f.sticky = sticky;
        f
    })
}

fn extent() -> impl Strategy<Value = Extent> {
    (-1e6f64..1e6, 0f64..1e6).prop_map(|(min, span)| Extent {
        min,
        max: min + span,
        count: 2,
    })
}

proptest! {
    #[test]
    fn normalize_is_monotone_and_bounded(e in extent(), a in 0f64..=1.0, b in 0f64..=1.0) {
        let va = e.min + a * (e.max - e.min);
        let vb = e.min + b * (e.max - e.min);
        let (na, nb) = (normalize(va, &e).unwrap().get(), normalize(vb, &e).unwrap().get());
        prop_assert!((0.0..=1.0).contains(&na) && (0.0..=1.0).contains(&nb));
        if va < vb {
            prop_assert!(na <= nb);
        }
        if e.max > e.min {
            prop_assert_eq!(normalize(e.min, &e).unwrap().get(), 0.0);
            prop_assert_eq!(normalize(e.max, &e).unwrap().get(), 1.0);
        }
    }

    #[test]
    fn normalize_is_affine_invariant(e in extent(), t in 0f64..=1.0, scale in 1e-3f64..1e3, shift in -1e3f64..1e3) {
        prop_assume!(e.max > e.min);
        let v = e.min + t * (e.max - e.min);
        let moved = Extent { min: e.min * scale + shift, max: e.max * scale + shift, count: 2 };
        let w = (v * scale + shift).clamp(moved.min, moved.max);
        let n0 = normalize(v, &e).unwrap().get();
        let n1 = normalize(w, &moved).unwrap().get();
        prop_assert!((n0 - n1).abs() < 1e-6, "{} vs {}", n0, n1);
    }

    #[test]
    fn scale_color_stays_between_neighbour_stops(v in 0f64..=1.0, id in prop::sample::select(ColorScale::preset_ids().collect::<Vec<_>>())) {
        let scale = ColorScale::preset(id).unwrap();
        let c = scale_color(NormalizedValue::new(v).unwrap(), &scale);
        let stops = scale.stops();
        let k = stops.windows(2).position(|w| v <= w[1].0).unwrap_or(stops.len() - 2);
        for ch in 0..3 {
            let (a, b) = (stops[k].1 .0[ch], stops[k + 1].1 .0[ch]);
            prop_assert!(a.min(b) <= c.0[ch] && c.0[ch] <= a.max(b));
        }
    }

    #[test]
    fn bar_height_spans_zero_to_hundred(v in 0f64..=1.0) {
        let h = bar_height(NormalizedValue::new(v).unwrap());
        prop_assert!((0.0..=100.0).contains(&h));
    }

    #[test]
    fn subset_extent_never_widens(cells in cells(), keep in prop::collection::vec(any::<bool>(), 25), year in FIRST..=LAST) {
        let t = table_from(&cells);
        let full = t.indicator_extent(keys::TOTAL_POPULATION, year, None).unwrap();
        let domain: BTreeSet<Iso3> = (0..cells.len()).filter(|i| keep[*i]).map(code).collect();
        if let Some(sub) = t.indicator_extent(keys::TOTAL_POPULATION, year, Some(&domain)).unwrap() {
            let full = full.unwrap();
            prop_assert!(full.min <= sub.min && sub.max <= full.max);
            prop_assert!(sub.count <= full.count);
        }
    }

    #[test]
    fn carry_matches_lookup_when_present(cells in cells(), year in FIRST..=LAST) {
        let t = table_from(&cells);
        for i in 0..cells.len() {
            for key in MAPPED {
                let strict = t.lookup_value(key, code(i), year).unwrap();
                let carried = t.value_with_carry(key, code(i), year).unwrap();
                match strict {
                    Some(v) => prop_assert_eq!(carried, Some((v, year))),
                    None => if let Some((_, y)) = carried { prop_assert!(y < year) },
                }
            }
        }
    }

    #[test]
    fn filters_combine_by_intersection(cells in cells(), f in filters(), year in FIRST..=LAST) {
        let t = table_from(&cells);
        let config = MappingConfig::default();
        let all = visible_countries(&t, &config, year, &f).unwrap();
        let mut expected = visible_countries(&t, &config, year, &FilterState::default()).unwrap();
        for ch in Channel::ALL {
            let only = FilterState::default().with(ch, f.interval(ch).copied());
            let v = visible_countries(&t, &config, year, &only).unwrap();
            expected = expected.intersection(&v).copied().collect();
        }
        prop_assert_eq!(all, expected);
    }

    #[test]
    fn narrowing_never_adds(cells in cells(), f in filters(), ch in prop::sample::select(Channel::ALL.to_vec()), shrink in 0f64..1.0, year in FIRST..=LAST) {
        let t = table_from(&cells);
        let config = MappingConfig::default();
        let wide = visible_countries(&t, &config, year, &f).unwrap();
        let narrowed = match f.interval(ch) {
            Some(i) => Interval::new(i.lo() + (i.hi() - i.lo()) * shrink / 2.0, i.hi()).unwrap(),
            None => Interval::new(0.0, 1e5).unwrap(),
        };
        let narrow = visible_countries(&t, &config, year, &f.with(ch, Some(narrowed))).unwrap();
        prop_assert!(narrow.is_subset(&wide));
    }

    #[test]
    fn effective_extent_covers_only_survivors(cells in cells(), i in interval(), year in FIRST..=LAST) {
        let t = table_from(&cells);
        if let (Some(i), Some(e)) = (i, effective_extent(&t, keys::TOTAL_POPULATION, year, i.as_ref()).unwrap()) {
            prop_assert!(i.contains(e.min) && i.contains(e.max));
        }
    }

    #[test]
    fn sticky_year_round_trip(f in filters(), y0 in FIRST..=LAST, y1 in FIRST..=LAST) {
        let years = YearRange::new(FIRST, LAST).unwrap();
        let mut state = ExploreState::new(y0, MappingConfig::default());
        state.filters = f;
        state.filters.sticky = true;
        let back = set_year(&set_year(&state, y1, years).unwrap(), y0, years).unwrap();
        prop_assert_eq!(back, state.clone());
        let json = serde_json::to_string(&state).unwrap();
        prop_assert_eq!(serde_json::from_str::<ExploreState>(&json).unwrap(), state);
    }

    #[test]
    fn frame_invariants(cells in cells(), f in filters(), year in FIRST..=LAST) {
        let t = table_from(&cells);
        let geo = Geography::new(vec![]).unwrap();
        let config = MappingConfig::default();
        let frame = build_frame(&t, &geo, &config, year, &f).unwrap();
        prop_assert_eq!(&frame, &build_frame(&t, &geo, &config, year, &f).unwrap());
        let round: livingglobe_core::mapping::VisualFrame =
            serde_json::from_str(&serde_json::to_string(&frame).unwrap()).unwrap();
        prop_assert_eq!(&round, &frame);

        let mut best_raw: Option<(f64, Iso3)> = None;
        let mut best_bar: Option<(f64, Iso3)> = None;
        for (iso3, e) in &frame.countries {
            if !e.visible {
                prop_assert!(e.country_color.is_none() && e.bar_color.is_none() && e.bar_height.is_none());
                continue;
            }
            prop_assert_eq!(e.bar_height.is_some(), e.bar_color.is_some());
            for ch in Channel::ALL {
                if let Some(n) = e.normalized.get(ch) {
                    prop_assert!((0.0..=1.0).contains(n));
                }
            }
            if let Some(h) = e.bar_height {
                let raw = e.raw.height.unwrap();
                if best_raw.is_none_or(|(v, _)| raw > v) { best_raw = Some((raw, *iso3)); }
                if best_bar.is_none_or(|(v, _)| h > v) { best_bar = Some((h, *iso3)); }
            }
        }
        if let (Some((raw, _)), Some((h, _))) = (best_raw, best_bar) {
            // ties in raw value may pick different countries; the heights must agree
            let e = frame.countries.values().find(|e| e.bar_height.is_some() && e.raw.height == Some(raw)).unwrap();
            prop_assert_eq!(e.bar_height, Some(h));
        }
    }

    #[test]
    fn suggestions_match_prefix(prefix in "[a-zA-Z]{0,3}") {
        let records: Vec<CountryRecord> = (0..60)
            .map(|i| CountryRecord::new(code(i * 7), &format!("{}land", code(i * 3)), 0.0, 0.0, vec![]).unwrap())
            .collect();
        let hits = suggest_countries(&prefix, &records);
        prop_assert!(hits.len() <= MAX_SUGGESTIONS);
        if prefix.is_empty() { prop_assert!(hits.is_empty()); }
        let p = prefix.to_lowercase();
        for h in &hits {
            prop_assert!(h.name.to_lowercase().starts_with(&p) || h.iso3.as_str().to_lowercase().starts_with(&p));
        }
        prop_assert!(hits.windows(2).all(|w| w[0].name.to_lowercase() <= w[1].name.to_lowercase()));
    }

    #[test]
    fn grey_levels_are_distinct_and_reserved_values_unused(n in 1usize..=254) {
        let square = vec![
            GeoPoint::new(0.0, 0.0).unwrap(),
            GeoPoint::new(0.0, 1.0).unwrap(),
            GeoPoint::new(1.0, 1.0).unwrap(),
        ];
        let records: Vec<CountryRecord> = (0..n)
            .map(|i| CountryRecord::new(code(i), "x", 0.5, 0.5, vec![square.clone()]).unwrap())
            .collect();
        let map = assign_grey_levels(&records).unwrap();
        prop_assert_eq!(map.len(), n);
        let levels: BTreeSet<u8> = map.iter().map(|(l, _)| l).collect();
        prop_assert_eq!(levels.len(), n);
        prop_assert!(!levels.contains(&SEA_LEVEL) && !levels.contains(&HIGHLIGHT_LEVEL));
        let by_code: Vec<u8> = records.iter().map(|r| map.level(r.iso3).unwrap()).collect();
        prop_assert!(by_code.windows(2).all(|w| w[0] < w[1]));
    }
}
