# Solution: cheapest card scheme for a merchant, plus the costliest
# merchant category code for a given transaction amount.

def match_capture_delay(rule, merchant):
    if rule["capture_delay"] is None:
        return True
    return rule["capture_delay"] == merchant["capture_delay"]

def match_fee_conditions(rule, merchant):
    if rule["account_type"] is not None:
        if merchant["account_type"] not in rule["account_type"]:
            return False
    return match_capture_delay(rule, merchant)

def merchant_matches_fee(rule, merchant):
    if rule["merchant_name"] is not None:
        if rule["merchant_name"] != merchant["name"]:
            return False
    return match_fee_conditions(rule, merchant)

def get_mcc_code_from_dsp(description):
    mapping = {"fitness": 7997, "restaurant": 5812}
    if description in mapping:
        return mapping[description]
    return None

def cheapest_card_scheme(rules, merchant, amount):
    mcc = get_mcc_code_from_dsp(merchant["description"])
    if mcc is None:
        return None
    best = None
    best_scheme = None
    for rule in rules:
        if merchant_matches_fee(rule, merchant):
            fee = rule["fixed_amount"] + rule["rate"] * amount / 10000
            if best is None or fee < best:
                best = fee
                best_scheme = rule["card_scheme"]
    return best_scheme

def compute_fee(rules, mcc, amount):
    for rule in rules:
        if rule_applies(rule, mcc):
            return rule["fixed_amount"] + rule["rate"] * amount / 10000
    return 0.0

def most_expensive(rules, amount):
    fees = [(compute_fee(rules, mcc, amount), mcc) for mcc in find_all_mccs(rules)]
    best = None
    best_mcc = None
    for pair in fees:
        if best is None or pair[0] > best:
            best = pair[0]
            best_mcc = pair[1]
    return best_mcc
