use std::ffi::CStr;
use std::ptr;

use refarray_ffi::*;

fn params() -> RaLinkParams {
    RaLinkParams {
        carrier_hz: 2.4e9,
        path_loss_exponent: 3.0,
        tx_power_mw: 1.0,
        noise_power_mw: 1e-9,
        sinr_threshold: 10f64.powf(0.5),
        rate_bps: 1e5,
    }
}

fn bottom_array(n: usize) -> RaArrayLayout {
    RaArrayLayout {
        center: RaPoint { x: 5.0, y: 0.0 },
        wall_normal: 2,
        element_count: n,
        element_spacing: 0.0625,
    }
}

fn last_error() -> String {
    let p = ra_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn make(tx: &[RaPoint], rx: &[RaPoint], layouts: &[RaArrayLayout]) -> (RaStatus, *mut RaScenario) {
    let mut s = ptr::null_mut();
    let p = params();
    let status = unsafe {
        ra_scenario_new(
            10.0,
            10,
            layouts.as_ptr(),
            layouts.len(),
            tx.as_ptr(),
            rx.as_ptr(),
            tx.len(),
            &p,
            &mut s,
        )
    };
    (status, s)
}

#[test]
fn single_link_snr_matches_hand_value() {
    // 3 m direct path, no array: SNR = 3^-6 / 1e-9.
    let (status, s) = make(
        &[RaPoint { x: 0.0, y: 0.0 }],
        &[RaPoint { x: 0.0, y: 3.0 }],
        &[],
    );
    assert_eq!(status, RaStatus::Ok);
    let mut out = 0.0;
    assert_eq!(
        unsafe { ra_sinr(s, ptr::null(), 0, 0, &mut out) },
        RaStatus::Ok
    );
    let expected = 3f64.powi(-6) / 1e-9;
    assert!((out - expected).abs() <= 1e-12 * expected);

    let (mut cap, mut feasible) = (0.0, false);
    assert_eq!(
        unsafe { ra_transport_capacity(s, ptr::null(), 0, &mut cap, &mut feasible) },
        RaStatus::Ok
    );
    assert!(feasible);
    assert!((cap - 1e5 * 27.0).abs() < 1e-6);
    unsafe { ra_scenario_free(s) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let (status, s) = make(
        &[RaPoint { x: 1.0, y: 1.0 }],
        &[RaPoint { x: 1.0, y: 1.0 }],
        &[],
    );
    assert_eq!(status, RaStatus::InvalidGeometry);
    assert!(s.is_null());
    assert!(!last_error().is_empty());

    let (status, _) = make(
        &[RaPoint { x: 0.5, y: 1.0 }],
        &[RaPoint { x: 1.0, y: 1.0 }],
        &[],
    );
    assert_eq!(status, RaStatus::InvalidGeometry);

    let mut bad = bottom_array(4);
    bad.wall_normal = 9;
    let (status, _) = make(
        &[RaPoint { x: 1.0, y: 1.0 }],
        &[RaPoint { x: 2.0, y: 2.0 }],
        &[bad],
    );
    assert_eq!(status, RaStatus::InvalidArgument);
    assert!(last_error().contains("wall normal"));

    let mut out = 0.0;
    assert_eq!(
        unsafe { ra_sinr(ptr::null(), ptr::null(), 0, 0, &mut out) },
        RaStatus::NullPointer
    );
    let name = unsafe { CStr::from_ptr(ra_status_name(RaStatus::BoundInvalid)) };
    assert_eq!(name.to_str().unwrap(), "bound invalid");
}

#[test]
fn phase_count_and_link_index_are_checked() {
    let (_, s) = make(
        &[RaPoint { x: 2.0, y: 3.0 }],
        &[RaPoint { x: 7.0, y: 6.0 }],
        &[bottom_array(4)],
    );
    assert_eq!(unsafe { ra_scenario_element_count(s) }, 4);
    assert_eq!(unsafe { ra_scenario_pairs(s) }, 1);
    let phases = [0.0; 3];
    let mut out = 0.0;
    assert_eq!(
        unsafe { ra_sinr(s, phases.as_ptr(), 3, 0, &mut out) },
        RaStatus::InvalidArgument
    );
    let phases = [0.0; 4];
    assert_eq!(
        unsafe { ra_sinr(s, phases.as_ptr(), 4, 1, &mut out) },
        RaStatus::InvalidArgument
    );
    unsafe { ra_scenario_free(s) };
}

#[test]
fn upper_bound_reports_vacuous_denominator() {
    let p = params();
    let mut out = -1.0;
    let status = unsafe { ra_upper_bound(&p, 5, 48, 1.0, 5f64.sqrt() * 10.0, &mut out) };
    assert_eq!(status, RaStatus::BoundInvalid);
    assert_eq!(out, -1.0);

    // Without reflectors the bound is R L / sqrt(eta sigma^2 / rho^2 + 0).
    let status = unsafe { ra_upper_bound(&p, 1, 0, 1.0, 22.0, &mut out) };
    assert_eq!(status, RaStatus::Ok);
    let beta = p.sinr_threshold;
    let expected = 1e5 / ((beta + 1.0) / beta * 1e-9f64).sqrt();
    assert!((out - expected).abs() <= 1e-9 * expected);
}

#[test]
fn optimized_phases_beat_zero_phases() {
    let tx = [RaPoint { x: 4.0, y: 2.0 }];
    let rx = [RaPoint { x: 6.0, y: 3.0 }];
    let (_, s) = make(&tx, &rx, &[bottom_array(16)]);
    let mut phases = [0.0; 16];
    let mut value = 0.0;
    let status = unsafe {
        ra_optimize_phases(
            s,
            RaObjective::SingleLinkSinr,
            0,
            std::f64::consts::PI / 90.0,
            50,
            phases.as_mut_ptr(),
            16,
            &mut value,
        )
    };
    assert_eq!(status, RaStatus::Ok);
    let (mut zero, mut opt) = (0.0, 0.0);
    unsafe {
        ra_sinr(s, [0.0; 16].as_ptr(), 16, 0, &mut zero);
        ra_sinr(s, phases.as_ptr(), 16, 0, &mut opt);
    }
    assert_eq!(opt, value);
    assert!(opt > zero);

    let status = unsafe {
        ra_optimize_phases(
            s,
            RaObjective::MinSinr,
            0,
            1.0,
            50,
            phases.as_mut_ptr(),
            16,
            &mut value,
        )
    };
    assert_eq!(
        status,
        RaStatus::InvalidArgument,
        "a 1 rad step does not divide the circle"
    );
    let status = unsafe {
        ra_optimize_phases(
            s,
            RaObjective::MinSinr,
            0,
            0.1,
            50,
            phases.as_mut_ptr(),
            3,
            &mut value,
        )
    };
    assert_eq!(status, RaStatus::InvalidArgument);
    unsafe { ra_scenario_free(s) };
}
