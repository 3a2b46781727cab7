use telephyt_core::kinematics::{Exercise, Side};
use telephyt_core::motion::{Recording, RecordingHeader};
use telephyt_core::pipeline::{analyze_frames, analyze_recording, AnalysisConfig, AnalysisRequest};
use telephyt_core::reps::{rep_velocity, SegmentationConfig};
use telephyt_core::synth::{generate, replay_schedule, BodyModel, ExerciseScript, Profile};

fn frames(script: &ExerciseScript) -> Vec<telephyt_core::motion::SkeletonFrame> {
    generate(script, &BodyModel::default(), 30.0, 1, 0).unwrap()
}

#[test]
fn linear_ramp_velocity_within_filter_budget() {
    let script = ExerciseScript {
        profile: Profile::LinearRamp,
        period_s: 2.0,
        ..ExerciseScript::new(Exercise::HipAbduction, Side::Left, 45.0)
    };
    let (_, reps) = analyze_frames(&frames(&script), script.exercise, script.side, &AnalysisConfig::default()).unwrap();
    assert_eq!(reps.len(), 12);
    for r in &reps {
        let v = rep_velocity(r).unwrap();
        assert!((v - 45.0).abs() <= 0.05 * 45.0, "{v}");
    }
}

#[test]
fn velocity_at_clinical_operating_point() {
    // Half-sine whose 10%-to-peak rise rate is near 52.5 °/s.
    let script = ExerciseScript {
        period_s: 1.465,
        ..ExerciseScript::new(Exercise::HipAbduction, Side::Right, 40.0)
    };
    let expected = script.expected_velocity_dps(SegmentationConfig::default().rise_threshold);
    assert!((expected - 52.5).abs() < 0.5, "{expected}");
    let (_, reps) = analyze_frames(&frames(&script), script.exercise, script.side, &AnalysisConfig::default()).unwrap();
    assert_eq!(reps.len(), 12);
    let mean = reps.iter().map(|r| rep_velocity(r).unwrap()).sum::<f64>() / reps.len() as f64;
    assert!((mean - expected).abs() <= 0.05 * expected, "{mean} vs {expected}");
}

#[test]
fn rep_count_matches_script_for_every_exercise() {
    for exercise in Exercise::ALL {
        for side in Side::BOTH {
            let script = ExerciseScript {
                noise_sd_deg: 0.5,
                seed: 17,
                ..ExerciseScript::new(exercise, side, 2.0 * SegmentationConfig::default().min_excursion_deg)
            };
            let (_, reps) = analyze_frames(&frames(&script), exercise, side, &AnalysisConfig::default()).unwrap();
            let included = reps.iter().filter(|r| r.is_included()).count();
            assert_eq!(included, 12, "{exercise} {side}");
        }
    }
}

#[test]
fn replayed_session_analyses_like_the_original() {
    let script = ExerciseScript::new(Exercise::HipFlexion, Side::Left, 35.0);
    let mut rec = Recording::new(RecordingHeader::new("room"));
    rec.frames = frames(&script);
    let replayed = Recording {
        frames: replay_schedule(&rec, 1.0, 1_700_000_000_000)
            .unwrap()
            .into_iter()
            .map(|s| s.frame)
            .collect(),
        ..rec.clone()
    };
    let req = AnalysisRequest { exercise: script.exercise, side: script.side, user_id: None, window_ms: None };
    let cfg = AnalysisConfig::default();
    let a = analyze_recording(&rec, &req, &cfg).unwrap();
    let b = analyze_recording(&replayed, &req, &cfg).unwrap();
    assert_eq!(a.reps, b.reps);
    assert_eq!(a.summary, b.summary);
}
