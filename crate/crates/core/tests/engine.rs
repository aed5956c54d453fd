use kriging_inpaint::maskgen::{generate_mask, MaskCategory, MaskSpec};
use kriging_inpaint::metrics::mse;
use kriging_inpaint::synth::{smooth_scene, textured_scene};
use kriging_inpaint::{apply_mask, inpaint, DamageMask, InpaintConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn empty_mask_is_identity() {
    let img = textured_scene(70, 45, 3, 5).unwrap();
    let (out, report) = inpaint(&img, &DamageMask::empty(70, 45), &InpaintConfig::default()).unwrap();
    assert_eq!(out, img);
    assert_eq!(report.pixels_filled, 0);
}

#[test]
fn restoring_a_restored_image_is_stable() {
    let img = smooth_scene(96, 96, 1, 2).unwrap();
    let mask = generate_mask(&MaskSpec::new(MaskCategory::LowText, 2), 96, 96).unwrap();
    let cfg = InpaintConfig::default();
    let (once, _) = inpaint(&apply_mask(&img, &mask, 0).unwrap(), &mask, &cfg).unwrap();
    let (twice, _) = inpaint(&once, &DamageMask::empty(96, 96), &cfg).unwrap();
    assert_eq!(once, twice);
}

#[test]
fn more_damage_rarely_helps() {
    // statistical: a superset mask should not restore better, allowing rare noise
    let img = smooth_scene(64, 64, 1, 9).unwrap();
    let cfg = InpaintConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut violations = 0;
    for _ in 0..20 {
        let small = DamageMask::from_fn(64, 64, |_, _| rng.gen_bool(0.03));
        let extra = DamageMask::from_fn(64, 64, |_, _| rng.gen_bool(0.15));
        let big = DamageMask::from_fn(64, 64, |r, c| small.is_damaged(r, c) || extra.is_damaged(r, c));
        assert!(small.is_subset_of(&big));
        let score = |m: &DamageMask| {
            let (out, _) = inpaint(&apply_mask(&img, m, 0).unwrap(), m, &cfg).unwrap();
            mse(&img, &out).unwrap()
        };
        if score(&small) > score(&big) {
            violations += 1;
        }
    }
    assert!(violations <= 2, "{violations} of 20 supersets restored better");
}
