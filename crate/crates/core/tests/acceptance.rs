//! One test per acceptance criterion; each prints a single PASS/FAIL line.

use charsum_core::suite::{run_criterion, SuiteOptions};

fn criterion(id: u8) {
    let result = run_criterion(id, &SuiteOptions::default()).expect("criterion aborted");
    println!("{}", result.summary_line());
    for case in result.failures().take(10) {
        println!("    failing: {} {}", case.key, case.detail);
    }
    assert!(result.pass(), "{}", result.summary_line());
}

#[test]
fn criterion_01_gauss_laws() {
    criterion(1);
}

#[test]
fn criterion_02_hd_lifting() {
    criterion(2);
}

#[test]
fn criterion_03_hd_product() {
    criterion(3);
}

#[test]
fn criterion_04_divisor_engine() {
    criterion(4);
}

#[test]
fn criterion_05_monomial_identities() {
    criterion(5);
}

#[test]
fn criterion_06_transform_three_minus_one() {
    criterion(6);
}

#[test]
fn criterion_07_transform_four_minus_two() {
    criterion(7);
}

#[test]
fn criterion_08_psixy() {
    criterion(8);
}

#[test]
fn criterion_09_n_fold_psixy() {
    criterion(9);
}

#[test]
fn criterion_10_binomials() {
    criterion(10);
}

#[test]
fn criterion_11_i_sums() {
    criterion(11);
}

#[test]
fn criterion_12_monomial_transform() {
    criterion(12);
}

#[test]
fn criterion_13_origin_stalks() {
    criterion(13);
}

#[test]
fn criterion_14_norm_layer() {
    criterion(14);
}

#[test]
fn criterion_15_falsifier() {
    criterion(15);
}
