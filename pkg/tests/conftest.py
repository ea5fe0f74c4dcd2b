import random

import pytest

from engage_miner.itemsets import Item, Itemset, TransactionDb


def basket(*names):
    """Market-basket style itemset: each name is its own presence attribute."""
    return Itemset(Item(n, 1) for n in names)


def random_db(rng: random.Random, max_attrs: int = 8, max_transactions: int = 30,
              n_values: int = 2) -> TransactionDb:
    """Random small database; at most one value per attribute per record."""
    n_attrs = rng.randint(1, max_attrs)
    attrs = [chr(ord("a") + i) for i in range(n_attrs)]
    m = rng.randint(1, max_transactions)
    transactions = []
    for _ in range(m):
        items = []
        for a in attrs:
            if rng.random() < 0.5:
                continue
            items.append(Item(a, rng.randrange(n_values)))
        transactions.append(Itemset(items))
    return TransactionDb(transactions)


@pytest.fixture
def four_row_db():
    """The worked example database: [{a,b}, {a,b}, {a}, {b}]."""
    return TransactionDb([basket("a", "b"), basket("a", "b"), basket("a"), basket("b")])
