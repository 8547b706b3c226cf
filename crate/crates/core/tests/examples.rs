// Compiles every example into this test binary and runs its main.

macro_rules! examples {
    ($($name:ident),* $(,)?) => {$(
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                main().unwrap();
            }
        }
    )*};
}

examples!(
    learn_costs,
    majority_vote,
    dictionary_fusion,
    candidates,
    fit_curve,
    prune_ensemble,
    simulate_and_evaluate,
    pipeline,
);
