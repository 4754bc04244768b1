use catrace::alphabet::{all_words, Letter, Word};
use catrace::compile::{sft_polytracer, sft_polytracer_recipe, ultimate_trace_compile, UltimateOutcome};
use catrace::verify::{check_trace, run_witnesses, sample_columns, Mode, Outcome, DEFAULT_SEED};
use catrace::{fixtures, Alphabet, CellularAutomaton, DeterministicOrbit, SubshiftHandle};

fn avoids(w: &[Letter], forbidden: &[&[Letter]]) -> bool {
    forbidden.iter().all(|f| !w.windows(f.len()).any(|x| x == *f))
}

#[test]
fn corrupted_rule_is_caught() {
    let sigma = fixtures::golden();
    let SubshiftHandle::Sft(sft) = &sigma else { unreachable!() };
    let g = sft_polytracer(sft).unwrap();
    assert!(check_trace(&g, &sigma, 6, Mode::Exact).passed());
    let table = g.rule().table().expect("tabulated rule").to_vec();
    let q = g.alphabet().len() as Letter;
    let mut caught = 0;
    for i in 0..table.len() {
        let mut t = table.clone();
        t[i] = (t[i] + 1) % q;
        let bad = CellularAutomaton::from_table(g.alphabet().clone(), g.anchor(), g.diameter(), t).unwrap();
        let r = check_trace(&bad, &sigma, 6, Mode::Exact);
        if r.outcome == Outcome::Fail {
            assert!(r.certificate.is_some());
            caught += 1;
        }
    }
    // entries reached only from windows outside the language change nothing
    assert!(caught > 0, "no corruption detected");
}

#[test]
fn ctrex_is_only_ultimately_traced() {
    let sigma = fixtures::ctrex();
    let SubshiftHandle::Sft(sft) = &sigma else { unreachable!() };
    let xi = sigma.contains_deterministic(false).expect("swap orbit");
    assert_eq!(xi.total_map(), Some(vec![1, 0]));
    let g = sft_polytracer(sft).unwrap();
    let out = ultimate_trace_compile(&sigma, Some((&g, sft_polytracer_recipe(sft))), &xi).unwrap();
    let UltimateOutcome::Compiled(art) = out else { panic!("compiled artifact expected") };
    assert_eq!((art.provenance.branch.as_deref(), art.offset), (Some("2"), 1));
    let forbidden: [&[Letter]; 3] = [&[1, 1], &[0, 0, 1], &[1, 0, 0]];
    let l6: Vec<Word> = all_words(2, 6).into_iter().filter(|w| avoids(w, &forbidden)).collect();
    assert!(run_witnesses(&art, &l6).passed());
    let ca = art.automaton();
    let tail = sample_columns(ca, 2000, 20, 8, DEFAULT_SEED, |c| avoids(&c[1..], &forbidden));
    assert!(tail.passed(), "{tail}");
    // the first row is an arbitrary configuration
    let exact = sample_columns(ca, 2000, 20, 8, DEFAULT_SEED, |c| avoids(c, &forbidden));
    assert_eq!(exact.outcome, Outcome::Fail);
}

#[test]
fn golden_mean_with_a_nilpotent_map_is_unsupported() {
    let sigma = fixtures::golden();
    let SubshiftHandle::Sft(sft) = &sigma else { unreachable!() };
    let g = sft_polytracer(sft).unwrap();
    let const0 = DeterministicOrbit::total(Alphabet::binary(), &[0, 0]).unwrap();
    let out = ultimate_trace_compile(&sigma, Some((&g, sft_polytracer_recipe(sft))), &const0).unwrap();
    match out {
        UltimateOutcome::Unsupported { branch, reason } => {
            assert_eq!(branch, 3);
            assert!(reason.contains("nilpotent"));
        }
        UltimateOutcome::Compiled(_) => panic!("branch 3 expected"),
    }
}
