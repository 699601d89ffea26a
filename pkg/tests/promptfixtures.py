"""Ten prompt records (two per grammar kind) pinned by golden files."""

from recipe_rewriter.promptfmt import PromptRecord

RECORDS = {
    "contextual-1": PromptRecord(
        "contextual", "vegan", "Hot Cocoa",
        src_ingredients=("2 cups milk", "cocoa powder", "sugar"),
        src_steps=("Mix cocoa powder and sugar in a mug.",
                   "Pour milk on top and stir."),
        tgt_steps=("Mix cocoa powder and sugar in a mug.",),
        tgt_step="Pour soymilk on top and stir."),
    "contextual-2": PromptRecord(
        "contextual", "dairy-free", "Garlic Bread",
        src_ingredients=("1 loaf bread", "4 tablespoons butter",
                         "3 cloves garlic"),
        src_steps=("Mash the garlic into the butter.",),
        tgt_steps=(),
        tgt_step="Mash the garlic into the nondairy butter."),
    "prompted-1": PromptRecord(
        "prompted", "vegan", "Pancakes",
        src_ingredients=("1 cup flour", "2 eggs", "1 cup milk"),
        src_steps=("Whisk flour, eggs, and milk in a bowl.",),
        tgt_steps=(),
        prompt_ingredients=("flour", "egg replacer", "soymilk"),
        tgt_step="Whisk flour, egg replacer, and soymilk in a bowl."),
    "prompted-2": PromptRecord(
        "prompted", "nut-free", "Cookies",
        src_ingredients=("1 cup peanut butter", "1 cup sugar"),
        src_steps=("Mix peanut butter and sugar.",
                   "Roll into balls and bake."),
        tgt_steps=("Mix sunflower seed butter and sugar.",),
        prompt_ingredients=(),
        tgt_step="Roll into balls and bake."),
    "ing-pred-1": PromptRecord(
        "ing-pred", None, "Hot Cocoa",
        src_ingredients=("2 cups milk", "cocoa powder", "sugar"),
        src_steps=("Mix cocoa powder and sugar in a mug.",),
        prompt_ingredients=("milk",)),
    "ing-pred-2": PromptRecord(
        "ing-pred", None, "Roasted Potatoes",
        src_ingredients=("4 potatoes", "olive oil"),
        src_steps=("Cut the potatoes into wedges.",
                   "Toss with olive oil and roast."),
        prompt_ingredients=()),
    "end-to-end-1": PromptRecord(
        "end-to-end", "dairy-free", "Hot Cocoa",
        src_ingredients=("2 cups milk", "cocoa powder"),
        src_steps=("Mix cocoa powder into milk.", "Heat and serve."),
        tgt_title="Hot Cocoa",
        tgt_ingredients=("2 cups soymilk", "cocoa powder"),
        tgt_steps=("Mix cocoa powder into soymilk.", "Heat and serve.")),
    "end-to-end-2": PromptRecord(
        "end-to-end", "alcohol-free", "Beer Bread",
        src_ingredients=("3 cups flour", "1 can beer"),
        src_steps=("Mix flour and beer.", "Bake for 50 minutes."),
        tgt_title="Beer Bread",
        tgt_ingredients=("3 cups flour", "1 can non-alcoholic beer"),
        tgt_steps=("Mix flour and non-alcoholic beer.",
                   "Bake for 50 minutes.")),
    "no-context-1": PromptRecord(
        "no-context", "vegan", "Hot Cocoa",
        src_steps=("Pour milk on top and stir.",),
        tgt_step="Pour soymilk on top and stir."),
    "no-context-2": PromptRecord(
        "no-context", "fish-free", "Caesar Salad",
        src_steps=("Whisk anchovy fillets into the dressing.",),
        tgt_step="Whisk capers into the dressing."),
}
