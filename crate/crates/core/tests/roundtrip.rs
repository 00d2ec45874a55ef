//! Format round-trip properties for the three text formats: treebank
//! trees, grammars, and annotated parse trees.

use proptest::prelude::*;

use lep_core::{
    parse_annotated, read_trees, write_trees, BracketedTree, Cost, Grammar, Hyp, ParseTree,
    Rule, Symbol, TreeChild, TreeNode,
};

fn tag_name() -> impl Strategy<Value = String> {
    "[a-z]{1,4}"
}

fn label_name() -> impl Strategy<Value = String> {
    "[A-Z]{1,4}"
}

fn arb_cost() -> impl Strategy<Value = Cost> {
    (0i64..9999).prop_map(Cost::from_centi)
}

fn arb_leaf() -> impl Strategy<Value = TreeChild> {
    ("[a-zA-Z0-9']{1,6}", tag_name()).prop_map(|(word, tag)| TreeChild::Leaf {
        word,
        tag: Symbol::terminal(&tag).unwrap(),
    })
}

fn arb_bracketed_tree() -> impl Strategy<Value = BracketedTree> {
    let leaf = arb_leaf();
    leaf.prop_recursive(4, 24, 4, |child| {
        (label_name(), prop::collection::vec(child, 1..4)).prop_map(|(label, children)| {
            TreeChild::Node(BracketedTree {
                label: Symbol::nonterminal(&label).unwrap(),
                children,
            })
        })
    })
    .prop_map(|child| match child {
        TreeChild::Node(n) => n,
        leaf => BracketedTree {
            label: Symbol::nonterminal("S").unwrap(),
            children: vec![leaf],
        },
    })
}

fn arb_term_hyp() -> impl Strategy<Value = Option<Hyp>> {
    prop_oneof![
        3 => Just(None),
        1 => arb_cost().prop_map(|cost| Some(Hyp::TermIns { cost })),
        1 => arb_cost().prop_map(|cost| Some(Hyp::TermDel { cost })),
        1 => (tag_name(), arb_cost()).prop_map(|(t, cost)| Some(Hyp::TermMut {
            expected: Symbol::terminal(&t).unwrap(),
            cost
        })),
    ]
}

fn arb_tree_node() -> impl Strategy<Value = TreeNode> {
    let leaf = prop_oneof![
        (tag_name(), arb_term_hyp()).prop_map(|(t, hyp)| TreeNode::Leaf {
            symbol: Symbol::terminal(&t).unwrap(),
            hyp,
        }),
        (label_name(), arb_cost()).prop_map(|(l, cost)| TreeNode::Leaf {
            symbol: Symbol::nonterminal(&l).unwrap(),
            hyp: Some(Hyp::PhraseDel { cost }),
        }),
    ];
    leaf.prop_recursive(4, 24, 4, |child| {
        (
            label_name(),
            prop::collection::vec(child, 1..4),
            prop_oneof![
                3 => Just(None),
                1 => arb_cost().prop_map(|cost| Some(Hyp::PhraseIns { cost })),
                1 => (label_name(), arb_cost()).prop_map(|(l, cost)| Some(Hyp::PhraseMut {
                    expected: Symbol::nonterminal(&l).unwrap(),
                    cost
                })),
            ],
        )
            .prop_map(|(label, children, hyp)| TreeNode::Phrase {
                label: Symbol::nonterminal(&label).unwrap(),
                children,
                hyp,
            })
    })
}

proptest! {
    #[test]
    fn treebank_trees_round_trip(tree in arb_bracketed_tree()) {
        let text = write_trees(std::slice::from_ref(&tree));
        let back = read_trees(&text).unwrap();
        prop_assert!(back.warnings.is_empty());
        prop_assert_eq!(back.trees, vec![tree]);
    }

    #[test]
    fn grammars_round_trip(trees in prop::collection::vec(arb_bracketed_tree(), 1..4)) {
        let g = match lep_core::induce_grammar(&trees) {
            Ok(g) => g,
            Err(_) => return Ok(()),
        };
        let text = g.to_text();
        let g2 = Grammar::from_text(&text).unwrap();
        prop_assert_eq!(g.start(), g2.start());
        let view = |g: &Grammar| -> Vec<(Symbol, Vec<Symbol>, u32)> {
            g.rules().iter().map(|r| (r.lhs.clone(), r.rhs.clone(), r.frequency)).collect()
        };
        prop_assert_eq!(view(&g), view(&g2));
        prop_assert_eq!(text, g2.to_text());
    }

    #[test]
    fn annotated_trees_round_trip(root in arb_tree_node()) {
        let tree = ParseTree { error: root.hyp_cost_sum(), root };
        let text = tree.to_string();
        let back = parse_annotated(&text).unwrap();
        prop_assert_eq!(back.root, tree.root);
        prop_assert_eq!(back.error, tree.error);
    }

    #[test]
    fn induction_is_permutation_invariant(
        trees in prop::collection::vec(arb_bracketed_tree(), 1..5),
        seed in any::<u64>(),
    ) {
        let g1 = match lep_core::induce_grammar(&trees) {
            Ok(g) => g,
            Err(_) => return Ok(()),
        };
        let mut shuffled = trees.clone();
        // Deterministic Fisher-Yates from the seed.
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        let g2 = lep_core::induce_grammar(&shuffled).unwrap();
        let view = |g: &Grammar| -> std::collections::BTreeSet<(Symbol, Vec<Symbol>, u32)> {
            g.rules().iter().map(|r| (r.lhs.clone(), r.rhs.clone(), r.frequency)).collect()
        };
        prop_assert_eq!(view(&g1), view(&g2));
    }

    #[test]
    fn pruning_partitions_frequencies(freqs in prop::collection::vec(1u32..50, 1..20)) {
        let rules: Vec<Rule> = freqs
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                Rule::new(
                    i as u32 + 1,
                    Symbol::nonterminal(&format!("N{i}")).unwrap(),
                    vec![Symbol::terminal("t").unwrap()],
                    f,
                )
                .unwrap()
            })
            .collect();
        let g = Grammar::new(rules, Symbol::nonterminal("N0").unwrap()).unwrap();
        let pruned = g.prune_by_average_frequency();
        let total: u64 = freqs.iter().map(|&f| u64::from(f)).sum();
        let count = freqs.len() as u64;
        let kept: std::collections::BTreeSet<u32> =
            pruned.rules().iter().map(|r| r.id).collect();
        let mut kept_total = 0u64;
        for r in g.rules() {
            if kept.contains(&r.id) {
                prop_assert!(u64::from(r.frequency) * count >= total);
                kept_total += u64::from(r.frequency);
            } else {
                prop_assert!(u64::from(r.frequency) * count < total);
            }
        }
        let removed_total: u64 = g
            .rules()
            .iter()
            .filter(|r| !kept.contains(&r.id))
            .map(|r| u64::from(r.frequency))
            .sum();
        prop_assert_eq!(kept_total + removed_total, total);
    }
}
