//! The bundled 2019 tabulations against the published table, with every
//! expected value computed here from the literal figures.

mod common;

use common::data;
use paretail::csvio::read_tabulation;
use paretail_core::estimators::empirical_ratios;
use paretail_core::tabulation::derive_capital;
use paretail_core::Concept;

/// (threshold, AGI returns, AGI total, wage returns, wage total), top group first.
const TABLE: [(f64, u64, i64, u64, i64); 18] = [
    (10_000_000.0, 20_876, 590_230_011, 16_866, 102_518_828),
    (5_000_000.0, 34_738, 237_781_553, 28_162, 66_367_353),
    (2_000_000.0, 143_514, 425_088_995, 117_168, 145_270_762),
    (1_500_000.0, 103_075, 176_961_208, 85_285, 72_754_006),
    (1_000_000.0, 254_197, 305_561_848, 214_955, 141_101_999),
    (500_000.0, 1_162_371, 781_920_814, 1_010_488, 449_489_139),
    (200_000.0, 7_297_883, 2_090_808_696, 6_414_121, 1_429_162_189),
    (100_000.0, 21_997_582, 3_004_363_636, 19_028_674, 2_209_484_837),
    (75_000.0, 14_118_568, 1_222_947_425, 12_033_727, 921_390_540),
    (50_000.0, 22_238_948, 1_366_892_948, 18_976_338, 1_071_062_478),
    (40_000.0, 12_503_041, 560_258_808, 10_931_707, 465_547_848),
    (30_000.0, 16_090_602, 560_073_192, 14_045_867, 471_544_226),
    (25_000.0, 9_289_939, 254_877_708, 7_943_835, 212_428_275),
    (20_000.0, 9_493_968, 213_660_160, 7_855_283, 173_142_941),
    (15_000.0, 10_039_446, 175_255_963, 7_931_946, 134_897_400),
    (10_000.0, 11_087_737, 138_230_399, 8_277_447, 100_631_554),
    (5_000.0, 9_925_940, 74_584_857, 7_622_306, 58_927_624),
    (1.0, 9_866_880, 24_439_988, 6_672_531, 23_927_191),
];

/// Returns below $1: (AGI returns, AGI total, wage returns, wage total).
const BOTTOM: (u64, i64, u64, i64) = (2_127_500, -237_064_231, 569_047, 23_421_857);

#[test]
fn bundled_rows_match_the_table() {
    let agi = read_tabulation(&data("agi_2019.csv")).unwrap();
    let wages = read_tabulation(&data("wages_2019.csv")).unwrap();
    assert_eq!((agi.year, agi.concept), (2019, Concept::Agi));
    assert_eq!(wages.ranked_by, Concept::Agi);
    assert_eq!(agi.k(), 18);
    for (k, row) in TABLE.iter().enumerate() {
        let (a, w) = (&agi.groups()[k], &wages.groups()[k]);
        assert_eq!(a.lower_threshold, Some(row.0));
        assert_eq!((a.count, a.total), (row.1, row.2), "AGI group {}", k + 1);
        assert_eq!((w.count, w.total), (row.3, row.4), "wage group {}", k + 1);
    }
    let (ab, wb) = (agi.bottom().unwrap(), wages.bottom().unwrap());
    assert_eq!((ab.count, ab.total, wb.count, wb.total), BOTTOM);
    assert_eq!((agi.grand_total_count, agi.grand_total_income), (157_796_807, 11_966_873_976));
    assert_eq!((wages.grand_total_count, wages.grand_total_income), (129_775_754, 8_273_071_046));
    assert!(agi.validate_totals().passed(), "{}", agi.validate_totals());
    assert!(wages.validate_totals().passed(), "{}", wages.validate_totals());
}

#[test]
fn cumulative_counts_and_ratios() {
    let agi = read_tabulation(&data("agi_2019.csv")).unwrap();
    let cv = agi.cumulate(true);
    assert_eq!(cv.cum_counts[0], 20_876);
    assert_eq!(cv.cum_counts[1], 20_876 + 34_738);
    assert_eq!(cv.cum_counts[1], 55_614);

    let m = empirical_ratios(&cv, 5).unwrap();
    let expected: Vec<f64> = (1..5).map(|k| TABLE[k].2 as f64 / TABLE[5].2 as f64).collect();
    assert_eq!(m.s.as_slice(), expected.as_slice());
    // s_2 = 0.3040993 rounds to 0.30410
    assert!((m.s[0] - 0.30410).abs() < 5e-6);
    for (got, printed) in m.s.iter().skip(1).zip([0.54365, 0.22632, 0.39078]) {
        assert!((got - printed).abs() < 5e-6, "{got} vs {printed}");
    }
}

#[test]
fn capital_is_agi_minus_wages_per_group() {
    let agi = read_tabulation(&data("agi_2019.csv")).unwrap();
    let wages = read_tabulation(&data("wages_2019.csv")).unwrap();
    let cap = derive_capital(&agi, &wages).unwrap();
    assert_eq!(cap.tabulation.groups()[0].total, 487_711_183);
    for (k, row) in TABLE.iter().enumerate() {
        let g = &cap.tabulation.groups()[k];
        assert_eq!(g.total, row.2 - row.4);
        assert_eq!(g.count, row.1, "capital keeps AGI counts");
        if row.0 >= 25_000.0 {
            assert!(g.total > 0, "negative capital income at {}", row.0);
        }
    }
}

#[test]
fn half_million_threshold_is_the_top_point_nine_percent() {
    let series = paretail::csvio::read_demographics(&data("demographics.csv")).unwrap();
    let n = paretail_core::sampleframe::potential_units(&series, 2019, 1950).unwrap();
    let above: u64 = TABLE.iter().take_while(|r| r.0 >= 500_000.0).map(|r| r.1).sum();
    assert_eq!(above, 1_718_771);
    let target = above as f64 / 0.009;
    assert!((n / target - 1.0).abs() < 0.05, "n = {n}, target {target}");
    let fractile = above as f64 / n;
    assert!((0.0085..0.0095).contains(&fractile), "{fractile}");
}
