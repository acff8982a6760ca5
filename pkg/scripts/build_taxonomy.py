#!/usr/bin/env python3
"""Regenerate the bundled taxonomy and vocabulary data files.

Writes src/advsem/data/taxonomy.tsv and src/advsem/data/imagenet_vocabulary.tsv.
The taxonomy is a hand-curated noun hierarchy: a generic upper ontology, a
set of labels commonly returned by cloud vision services, and the full
1000-class ImageNet vocabulary attached to it (explicit placements where the
category matters, coarse fallbacks elsewhere).

Requires torchvision (source of the canonical class-name ordering).
"""

from __future__ import annotations

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from torchvision.models import _meta  # noqa: E402

from advsem.taxonomy import load_taxonomy, normalize_label  # noqa: E402

DATA_DIR = REPO / "src" / "advsem" / "data"

# (node_id, "lemma|lemma", "hypernym|hypernym").  node_id doubles as the
# primary lemma unless the lemma column says otherwise.
ONTOLOGY: list[tuple[str, str, str]] = [
    # --- top levels -------------------------------------------------------
    ("entity", "entity", ""),
    ("physical_entity", "physical_entity", "entity"),
    ("abstraction", "abstraction|abstract_entity", "entity"),
    ("object", "object|physical_object", "physical_entity"),
    ("matter", "matter", "physical_entity"),
    ("substance", "substance", "matter"),
    ("part", "part|piece", "physical_entity"),
    ("thing", "thing", "physical_entity"),
    ("whole", "whole|unit", "object"),
    ("natural_object", "natural_object", "whole"),
    ("living_thing", "living_thing|animate_thing", "whole"),
    ("organism", "organism|being", "living_thing"),
    ("artifact", "artifact|artefact", "whole"),
    ("geological_formation", "geological_formation|formation", "object"),
    ("body_part", "body_part", "part"),
    ("snout", "snout", "body_part"),
    ("whiskers", "whiskers", "body_part"),
    ("body_covering", "body_covering", "natural_object"),
    ("fur", "fur|pelage", "body_covering"),
    ("hair", "hair", "body_covering"),
    ("feather", "feather|plumage", "body_covering"),
    ("plant_part", "plant_part|plant_organ", "natural_object"),
    ("seed", "seed", "plant_part"),
    ("fruit", "fruit", "plant_part"),
    ("sky", "sky", "natural_object"),
    ("cloud", "cloud", "natural_object"),
    ("water", "water", "substance"),
    ("snow", "snow", "substance"),
    ("wood", "wood", "substance"),
    ("metal", "metal", "substance"),
    ("pattern", "pattern|design", "abstraction"),
    # --- organisms --------------------------------------------------------
    ("animal", "animal|animate_being|beast|fauna|wildlife", "organism"),
    ("plant", "plant|flora|vegetation", "organism"),
    ("fungus", "fungus|fungi", "organism"),
    ("person", "person|human|people", "organism"),
    ("vertebrate", "vertebrate|craniate", "animal"),
    ("invertebrate", "invertebrate", "animal"),
    ("mammal", "mammal|mammalian", "vertebrate"),
    ("bird", "bird", "vertebrate"),
    ("fish", "fish", "vertebrate"),
    ("reptile", "reptile|reptilian", "vertebrate"),
    ("amphibian", "amphibian", "vertebrate"),
    ("carnivore", "carnivore|carnivora|carnivoran", "mammal"),
    ("canine", "canine|canid|canidae", "carnivore"),
    ("dog", "dog|domestic_dog|dog_breed", "canine"),
    ("hunting_dog", "hunting_dog", "dog"),
    ("hound", "hound|hound_dog", "hunting_dog"),
    ("terrier", "terrier", "hunting_dog"),
    ("sporting_dog", "sporting_dog|gun_dog", "hunting_dog"),
    ("spaniel", "spaniel", "sporting_dog"),
    ("retriever", "retriever", "sporting_dog"),
    ("setter", "setter", "sporting_dog"),
    ("pointer", "pointer", "sporting_dog"),
    ("working_dog", "working_dog", "dog"),
    ("sled_dog", "sled_dog", "working_dog"),
    ("shepherd_dog", "shepherd_dog|sheepdog", "working_dog"),
    ("toy_dog", "toy_dog|lapdog", "dog"),
    ("poodle", "poodle|poodle_dog", "dog"),
    ("corgi", "corgi|welsh_corgi", "dog"),
    ("schnauzer", "schnauzer", "terrier"),
    ("basenji", "basenji", "hound"),
    ("wolf", "wolf", "canine"),
    ("fox", "fox", "canine"),
    ("feline", "feline|felid|felidae", "carnivore"),
    ("cat", "cat|domestic_cat|house_cat", "feline"),
    ("big_cat", "big_cat", "feline"),
    ("bear", "bear", "carnivore"),
    ("mustelid", "mustelid|musteline_mammal", "carnivore"),
    ("ungulate", "ungulate|hoofed_mammal", "mammal"),
    ("equine", "equine|equid", "ungulate"),
    ("horse", "horse", "equine"),
    ("bovid", "bovid", "ungulate"),
    ("swine", "swine", "ungulate"),
    ("camelid", "camelid", "ungulate"),
    ("rodent", "rodent|gnawer", "mammal"),
    ("lagomorph", "lagomorph", "mammal"),
    ("rabbit", "rabbit|bunny", "lagomorph"),
    ("primate", "primate", "mammal"),
    ("monkey", "monkey", "primate"),
    ("ape", "ape", "primate"),
    ("lemur", "lemur", "primate"),
    ("elephant", "elephant", "mammal"),
    ("marsupial", "marsupial|pouched_mammal", "mammal"),
    ("monotreme", "monotreme|egg-laying_mammal", "mammal"),
    ("aquatic_mammal", "aquatic_mammal|marine_mammal", "mammal"),
    ("whale", "whale", "aquatic_mammal"),
    ("insect", "insect", "invertebrate"),
    ("beetle", "beetle", "insect"),
    ("butterfly", "butterfly", "insect"),
    ("arachnid", "arachnid|arachnoid", "invertebrate"),
    ("spider", "spider", "arachnid"),
    ("crustacean", "crustacean", "invertebrate"),
    ("crab", "crab", "crustacean"),
    ("lobster", "lobster", "crustacean"),
    ("mollusk", "mollusk|mollusc|shellfish", "invertebrate"),
    ("echinoderm", "echinoderm", "invertebrate"),
    ("coelenterate", "coelenterate|cnidarian", "invertebrate"),
    ("coral", "coral", "coelenterate"),
    ("worm", "worm", "invertebrate"),
    ("snake", "snake|serpent", "reptile"),
    ("lizard", "lizard", "reptile"),
    ("turtle", "turtle", "reptile"),
    ("crocodilian", "crocodilian|crocodilian_reptile", "reptile"),
    ("dinosaur", "dinosaur", "reptile"),
    ("frog", "frog|toad", "amphibian"),
    ("salamander", "salamander", "amphibian"),
    ("waterfowl", "waterfowl|water_bird", "bird"),
    ("duck", "duck", "waterfowl"),
    ("goose", "goose", "waterfowl"),
    ("parrot", "parrot", "bird"),
    ("bird_of_prey", "bird_of_prey|raptor", "bird"),
    ("owl", "owl", "bird_of_prey"),
    ("game_bird", "game_bird", "bird"),
    ("wading_bird", "wading_bird|wader", "bird"),
    ("seabird", "seabird", "bird"),
    ("songbird", "songbird|passerine", "bird"),
    ("shark", "shark", "fish"),
    ("ray", "ray", "fish"),
    # --- plants -----------------------------------------------------------
    ("vascular_plant", "vascular_plant|tracheophyte", "plant"),
    ("flower", "flower|bloom|flowering_plant", "plant"),
    ("tree", "tree", "plant"),
    ("grass", "grass", "plant"),
    ("herb", "herb", "plant"),
    ("shrub", "shrub|bush", "plant"),
    # --- food -------------------------------------------------------------
    ("food", "food|nutrient", "substance"),
    ("beverage", "beverage|drink|potable", "food"),
    ("alcohol", "alcohol|alcoholic_beverage", "beverage"),
    ("wine", "wine", "alcohol"),
    ("coffee", "coffee|java", "beverage"),
    ("espresso", "espresso", "coffee"),
    ("tea", "tea", "beverage"),
    ("nutriment", "nutriment", "food"),
    ("dish", "dish", "nutriment"),
    ("soup", "soup", "dish"),
    ("dessert", "dessert|sweet|afters", "nutriment"),
    ("baked_goods", "baked_goods", "food"),
    ("bread", "bread", "baked_goods"),
    ("produce", "produce|green_goods", "food"),
    ("vegetable", "vegetable|veggie", "produce"),
    ("edible_fruit", "edible_fruit", "produce|fruit"),
    ("condiment", "condiment", "food"),
    ("sauce", "sauce", "condiment"),
    # --- artifacts --------------------------------------------------------
    ("instrumentality", "instrumentality|instrumentation", "artifact"),
    ("device", "device", "instrumentality"),
    ("instrument", "instrument", "device"),
    ("implement", "implement", "instrumentality"),
    ("tool", "tool", "implement"),
    ("utensil", "utensil", "implement"),
    ("cookware", "cookware|cooking_utensil", "utensil"),
    ("pan", "pan|cooking_pan", "cookware"),
    ("ware", "ware", "artifact"),
    ("tableware", "tableware", "ware"),
    ("dishware", "dishware|crockery", "tableware"),
    ("serviceware", "serviceware", "tableware"),
    ("drinkware", "drinkware", "tableware"),
    ("cutlery", "cutlery|eating_utensil", "tableware"),
    ("cup", "cup", "drinkware|dishware"),
    ("mug", "mug|coffee_mug", "drinkware"),
    ("glass", "glass|drinking_glass", "drinkware"),
    ("plate", "plate", "dishware"),
    ("bowl", "bowl", "dishware"),
    ("tray", "tray", "tableware"),
    ("container", "container", "instrumentality"),
    ("vessel", "vessel", "container"),
    ("bottle", "bottle", "vessel"),
    ("jug", "jug", "vessel"),
    ("pot", "pot", "vessel"),
    ("box", "box", "container"),
    ("bag", "bag", "container"),
    ("basket", "basket", "container"),
    ("clothing", "clothing|apparel|clothes|wear", "artifact"),
    ("garment", "garment", "clothing"),
    ("robe", "robe", "garment"),
    ("kimono", "kimono", "robe"),
    ("dress", "dress|frock", "garment"),
    ("skirt", "skirt", "garment"),
    ("coat", "coat", "garment"),
    ("sweater", "sweater|jumper", "garment"),
    ("shirt", "shirt", "garment"),
    ("trousers", "trousers|pants", "garment"),
    ("swimsuit", "swimsuit|swimwear|bathing_suit", "garment"),
    ("uniform", "uniform", "clothing"),
    ("underwear", "underwear|undergarment", "clothing"),
    ("neckwear", "neckwear", "clothing"),
    ("necktie", "necktie|tie", "neckwear"),
    ("headgear", "headgear|headdress", "clothing"),
    ("hat", "hat|chapeau", "headgear"),
    ("cap", "cap", "headgear"),
    ("helmet", "helmet", "headgear"),
    ("footwear", "footwear|footgear", "clothing"),
    ("shoe", "shoe", "footwear"),
    ("boot", "boot", "footwear"),
    ("hosiery", "hosiery", "clothing"),
    ("handwear", "handwear", "clothing"),
    ("fabric", "fabric|cloth|textile|material", "artifact"),
    ("jewelry", "jewelry|jewellery", "artifact"),
    ("structure", "structure|construction", "artifact"),
    ("building", "building|edifice", "structure"),
    ("housing", "housing|lodging", "structure"),
    ("dwelling", "dwelling|home|abode", "housing"),
    ("room", "room", "structure"),
    ("bedroom", "bedroom|sleeping_room", "room"),
    ("living_room", "living_room|livingroom|sitting_room", "room"),
    ("place_of_worship", "place_of_worship|house_of_worship", "building"),
    ("church", "church|church_building", "place_of_worship"),
    ("shop", "shop|store", "building"),
    ("theater", "theater|theatre", "building"),
    ("tower", "tower", "structure"),
    ("bell_cote", "bell_cote|bell_cot", "tower"),
    ("steeple", "steeple|spire", "tower"),
    ("bridge", "bridge|span", "structure"),
    ("barrier", "barrier", "structure"),
    ("fence", "fence|fencing", "barrier"),
    ("wall", "wall", "barrier"),
    ("roof", "roof", "structure"),
    ("arch", "arch", "structure"),
    ("monument", "monument|memorial", "structure"),
    ("conveyance", "conveyance|transport", "instrumentality"),
    ("vehicle", "vehicle", "conveyance"),
    ("craft", "craft", "vehicle"),
    ("aircraft", "aircraft", "craft"),
    ("airplane", "airplane|aeroplane", "aircraft"),
    ("watercraft", "watercraft", "craft"),
    ("boat", "boat", "watercraft"),
    ("ship", "ship", "watercraft"),
    ("sailing_vessel", "sailing_vessel|sailboat", "watercraft"),
    ("wheeled_vehicle", "wheeled_vehicle", "vehicle"),
    ("self_propelled_vehicle", "self-propelled_vehicle", "wheeled_vehicle"),
    ("motor_vehicle", "motor_vehicle|automotive_vehicle", "self_propelled_vehicle"),
    ("car", "car|auto|automobile|motorcar", "motor_vehicle"),
    ("truck", "truck|motortruck", "motor_vehicle"),
    ("bus", "bus|autobus", "motor_vehicle"),
    ("motorcycle", "motorcycle", "motor_vehicle"),
    ("locomotive", "locomotive|engine", "self_propelled_vehicle"),
    ("train", "train|railroad_train", "vehicle"),
    ("bicycle", "bicycle|bike", "wheeled_vehicle"),
    ("cart", "cart|wagon|waggon", "wheeled_vehicle"),
    ("sled", "sled|sledge|sleigh", "vehicle"),
    ("military_vehicle", "military_vehicle", "vehicle"),
    ("furnishing", "furnishing", "instrumentality"),
    ("furniture", "furniture|piece_of_furniture", "furnishing"),
    ("seat", "seat", "furniture"),
    ("chair", "chair", "seat"),
    ("bench", "bench", "seat"),
    ("couch", "couch|sofa|lounge", "seat"),
    ("table", "table", "furniture"),
    ("desk", "desk", "table"),
    ("bed", "bed", "furniture"),
    ("cabinet", "cabinet", "furniture"),
    ("bookcase", "bookcase", "furniture"),
    ("wardrobe", "wardrobe|closet", "furniture"),
    ("curtain", "curtain|drape|drapery", "furnishing"),
    ("lamp", "lamp", "device"),
    ("light", "light|light_source", "device"),
    ("appliance", "appliance|home_appliance", "device"),
    ("kitchen_appliance", "kitchen_appliance", "appliance"),
    ("white_goods", "white_goods", "appliance"),
    ("electronic_device", "electronic_device", "device"),
    ("machine", "machine", "device"),
    ("computer", "computer|computing_device|computing_machine", "machine"),
    ("keyboard", "keyboard", "device"),
    ("display", "display|video_display|monitor", "electronic_device"),
    ("equipment", "equipment", "instrumentality"),
    ("electronic_equipment", "electronic_equipment", "equipment"),
    ("telephone", "telephone|phone", "electronic_equipment"),
    ("photographic_equipment", "photographic_equipment", "equipment"),
    ("camera", "camera", "photographic_equipment"),
    ("sports_equipment", "sports_equipment", "equipment"),
    ("game_equipment", "game_equipment", "equipment"),
    ("ball", "ball", "game_equipment"),
    ("musical_instrument", "musical_instrument", "device"),
    ("wind_instrument", "wind_instrument", "musical_instrument"),
    ("brass_instrument", "brass_instrument", "wind_instrument"),
    ("stringed_instrument", "stringed_instrument", "musical_instrument"),
    ("percussion_instrument", "percussion_instrument", "musical_instrument"),
    ("keyboard_instrument", "keyboard_instrument", "musical_instrument"),
    ("piano", "piano|pianoforte", "keyboard_instrument"),
    ("guitar", "guitar", "stringed_instrument"),
    ("drum", "drum", "percussion_instrument"),
    ("weapon", "weapon|arm|weapon_system", "device"),
    ("gun", "gun", "weapon"),
    ("knife", "knife|blade", "tool"),
    ("optical_instrument", "optical_instrument", "instrument"),
    ("medical_instrument", "medical_instrument", "instrument"),
    ("measuring_instrument", "measuring_instrument|measuring_device", "instrument"),
    ("timepiece", "timepiece|timekeeper", "measuring_instrument"),
    ("clock", "clock", "timepiece"),
    ("watch", "watch|wristwatch", "timepiece"),
    ("fastener", "fastener|fastening", "device"),
    ("restraint", "restraint", "device"),
    ("covering", "covering", "artifact"),
    ("protective_covering", "protective_covering", "covering"),
    ("mask", "mask", "protective_covering"),
    ("armor", "armor|armour", "protective_covering"),
    ("rug", "rug|carpet", "covering"),
    ("toy", "toy|plaything", "artifact"),
    ("creation", "creation", "artifact"),
    ("product", "product", "creation"),
    ("work", "work|piece_of_work", "product"),
    ("publication", "publication", "work"),
    ("book", "book", "publication"),
    ("art", "art|fine_art|visual_arts", "creation"),
    ("graphic_art", "graphic_art", "art"),
    ("painting", "painting|picture", "graphic_art"),
    ("drawing", "drawing", "graphic_art"),
    ("illustration", "illustration", "graphic_art"),
    ("plastic_art", "plastic_art", "art"),
    ("sculpture", "sculpture", "plastic_art"),
    ("representation", "representation", "creation"),
    ("photograph", "photograph|photo", "representation"),
    ("signboard", "signboard|sign", "artifact"),
    ("tent", "tent|collapsible_shelter", "structure"),
    ("mountain", "mountain|mount", "geological_formation"),
    ("shore", "shore", "geological_formation"),
    ("reef", "reef", "geological_formation"),
]

# Coarse placement for contiguous index ranges of the ImageNet ordering.
DEFAULT_RANGES: list[tuple[int, int, str]] = [
    (0, 6, "fish"),
    (7, 24, "bird"),
    (25, 29, "salamander"),
    (30, 32, "frog"),
    (33, 37, "turtle"),
    (38, 48, "lizard"),
    (49, 50, "crocodilian"),
    (51, 51, "dinosaur"),
    (52, 68, "snake"),
    (69, 69, "invertebrate"),
    (70, 78, "arachnid"),
    (79, 79, "invertebrate"),
    (80, 100, "bird"),
    (101, 101, "elephant"),
    (102, 103, "monotreme"),
    (104, 106, "marsupial"),
    (107, 109, "coelenterate"),
    (110, 111, "worm"),
    (112, 117, "mollusk"),
    (118, 126, "crustacean"),
    (127, 146, "bird"),
    (147, 150, "aquatic_mammal"),
    (151, 158, "toy_dog"),
    (159, 177, "hound"),
    (178, 178, "sporting_dog"),
    (179, 203, "terrier"),
    (204, 204, "dog"),
    (205, 209, "retriever"),
    (210, 211, "pointer"),
    (212, 214, "setter"),
    (215, 221, "spaniel"),
    (222, 247, "working_dog"),
    (248, 250, "sled_dog"),
    (251, 268, "dog"),
    (269, 271, "wolf"),
    (272, 275, "canine"),
    (276, 276, "carnivore"),
    (277, 280, "fox"),
    (281, 285, "cat"),
    (286, 293, "big_cat"),
    (294, 297, "bear"),
    (298, 299, "carnivore"),
    (300, 307, "beetle"),
    (308, 320, "insect"),
    (321, 326, "butterfly"),
    (327, 329, "echinoderm"),
    (330, 332, "rabbit"),
    (333, 338, "rodent"),
    (339, 340, "equine"),
    (341, 343, "swine"),
    (344, 344, "ungulate"),
    (345, 353, "bovid"),
    (354, 355, "camelid"),
    (356, 360, "mustelid"),
    (361, 361, "carnivore"),
    (362, 362, "mustelid"),
    (363, 364, "mammal"),
    (365, 369, "ape"),
    (370, 382, "monkey"),
    (383, 384, "lemur"),
    (385, 386, "elephant"),
    (387, 388, "mammal"),
    (389, 397, "fish"),
    (398, 923, "artifact"),
    (924, 935, "dish"),
    (936, 946, "vegetable"),
    (947, 947, "fungus"),
    (948, 957, "edible_fruit"),
    (958, 958, "food"),
    (959, 965, "dish"),
    (966, 966, "wine"),
    (967, 969, "beverage"),
    (970, 980, "geological_formation"),
    (981, 983, "person"),
    (984, 984, "plant"),
    (985, 986, "flower"),
    (987, 987, "vegetable"),
    (988, 990, "seed"),
    (991, 997, "fungus"),
    (998, 998, "plant_part"),
    (999, 999, "artifact"),
]

# Class-level placements that the range defaults get wrong or too coarse.
OVERRIDES: dict[int, str] = {
    2: "shark", 3: "shark", 4: "shark", 5: "ray", 6: "ray",
    97: "duck", 98: "duck", 99: "goose", 100: "goose",
    109: "coral",
    122: "lobster", 123: "lobster",
    145: "seabird", 146: "seabird",
    196: "schnauzer", 197: "schnauzer", 198: "schnauzer",
    252: "toy_dog", 253: "basenji", 254: "toy_dog",
    255: "working_dog", 256: "working_dog", 257: "working_dog",
    258: "sled_dog", 259: "toy_dog", 262: "toy_dog",
    263: "corgi", 264: "corgi",
    265: "poodle", 266: "poodle", 267: "poodle",
    339: "horse",
    # artifacts ------------------------------------------------------------
    399: "garment", 400: "garment", 401: "keyboard_instrument",
    402: "guitar", 403: "ship", 404: "airplane", 405: "aircraft",
    406: "structure", 407: "truck", 408: "motor_vehicle", 409: "clock",
    410: "structure", 411: "garment",
    412: "container", 413: "gun", 414: "bag", 415: "shop",
    416: "sports_equipment", 417: "aircraft",
    418: "implement", 420: "stringed_instrument", 421: "barrier",
    422: "sports_equipment", 423: "chair", 424: "shop", 425: "building",
    426: "measuring_instrument", 427: "vessel", 428: "cart",
    429: "ball", 430: "ball",
    431: "bed", 432: "wind_instrument", 433: "cap", 435: "vessel",
    436: "car",
    437: "tower", 439: "headgear", 440: "bottle", 441: "glass", 443: "garment",
    444: "bicycle", 445: "swimsuit", 446: "container", 447: "optical_instrument",
    448: "structure", 449: "building", 450: "sled", 451: "necktie",
    452: "headgear", 453: "bookcase", 454: "shop", 456: "weapon",
    457: "necktie", 459: "underwear", 460: "barrier", 462: "implement",
    463: "vessel", 464: "fastener", 465: "garment", 466: "train",
    467: "shop", 468: "car", 469: "pot", 471: "gun", 472: "boat",
    473: "tool", 474: "sweater", 477: "tool", 478: "box",
    480: "machine", 481: "electronic_equipment", 482: "electronic_equipment",
    483: "building", 484: "boat", 485: "electronic_equipment",
    486: "stringed_instrument", 487: "telephone", 488: "fastener",
    489: "fence", 490: "armor", 491: "tool", 492: "box", 493: "cabinet",
    494: "percussion_instrument", 495: "cabinet", 496: "hosiery",
    498: "theater", 499: "knife", 500: "dwelling", 501: "garment",
    502: "shoe", 503: "container", 505: "pot", 507: "fastener",
    508: "keyboard", 509: "shop", 510: "ship", 511: "car", 512: "tool",
    513: "brass_instrument", 514: "boot", 515: "hat", 516: "bed",
    517: "machine", 518: "helmet", 519: "box", 520: "bed", 521: "pot",
    522: "ball", 523: "implement", 524: "armor", 525: "barrier",
    527: "computer", 528: "telephone", 529: "garment", 530: "clock",
    531: "watch", 532: "table", 533: "fabric", 534: "white_goods",
    535: "device", 536: "structure", 537: "sled", 538: "structure",
    540: "structure", 542: "implement", 543: "sports_equipment",
    544: "pot", 545: "appliance", 546: "guitar", 547: "locomotive",
    548: "furniture", 549: "container", 550: "kitchen_appliance",
    552: "garment", 553: "cabinet", 554: "boat", 555: "truck",
    556: "protective_covering", 558: "wind_instrument", 559: "chair",
    560: "helmet", 561: "self_propelled_vehicle", 562: "structure",
    563: "implement", 564: "bed", 565: "wheeled_vehicle",
    566: "brass_instrument", 567: "pan", 568: "coat", 569: "truck",
    570: "mask", 572: "drinkware", 573: "motor_vehicle",
    575: "motor_vehicle", 576: "boat", 577: "percussion_instrument",
    578: "garment", 579: "piano", 580: "building", 582: "shop",
    583: "machine", 584: "fastener", 586: "military_vehicle",
    587: "tool", 588: "basket", 589: "appliance", 590: "computer",
    591: "fabric", 592: "electronic_device", 593: "wind_instrument",
    594: "stringed_instrument", 595: "machine", 596: "tool",
    597: "container", 598: "electronic_equipment", 600: "fastener",
    601: "skirt", 602: "sports_equipment", 603: "cart", 604: "timepiece",
    605: "electronic_device", 606: "appliance", 607: "lamp", 608: "trousers",
    609: "car", 610: "shirt", 611: "toy", 612: "cart", 613: "device",
    615: "protective_covering", 617: "coat", 618: "utensil",
    620: "computer", 621: "tool", 623: "tool", 624: "building",
    625: "boat", 626: "device", 627: "car", 628: "ship",
    630: "shoe", 632: "electronic_equipment", 633: "optical_instrument",
    634: "building", 635: "measuring_instrument", 636: "bag",
    637: "box", 638: "swimsuit", 639: "swimsuit", 640: "covering",
    641: "percussion_instrument", 642: "percussion_instrument",
    645: "structure", 646: "structure", 647: "vessel", 648: "cabinet",
    650: "electronic_equipment", 651: "kitchen_appliance",
    652: "uniform", 653: "vessel", 654: "bus", 655: "skirt", 656: "car",
    657: "weapon", 658: "handwear", 659: "bowl", 660: "dwelling",
    661: "car", 662: "electronic_equipment", 663: "building",
    664: "display", 665: "motorcycle", 666: "vessel", 667: "headgear",
    668: "place_of_worship", 669: "protective_covering",
    670: "motorcycle", 671: "bicycle", 672: "tent", 673: "electronic_device",
    674: "device", 675: "truck", 676: "restraint", 677: "fastener",
    679: "jewelry", 681: "computer", 682: "monument",
    683: "wind_instrument", 684: "wind_instrument",
    685: "measuring_instrument", 686: "device", 687: "keyboard_instrument",
    688: "electronic_equipment", 689: "skirt", 690: "cart",
    691: "mask", 692: "container", 693: "implement", 695: "fastener",
    696: "implement", 697: "garment", 698: "building",
    699: "wind_instrument", 701: "equipment", 702: "sports_equipment",
    703: "bench", 704: "measuring_instrument", 705: "wheeled_vehicle",
    706: "structure", 707: "telephone", 709: "box", 710: "tool",
    712: "vessel", 713: "machine", 715: "helmet", 716: "fence",
    717: "truck", 718: "structure", 719: "container", 720: "bottle",
    721: "furnishing", 722: "ball", 723: "toy", 724: "ship",
    725: "vessel", 726: "tool", 727: "building", 728: "bag",
    730: "tool", 731: "tool", 732: "camera", 733: "implement",
    734: "truck", 735: "garment", 736: "table", 737: "bottle",
    740: "tool", 741: "rug", 742: "machine", 743: "building",
    744: "weapon", 745: "optical_instrument", 746: "sports_equipment",
    747: "sports_equipment", 748: "bag", 750: "covering",
    751: "car", 752: "sports_equipment", 753: "device",
    754: "electronic_equipment", 755: "instrument", 756: "vessel",
    757: "motor_vehicle", 758: "device", 759: "camera",
    760: "white_goods", 761: "device", 762: "building", 763: "gun",
    764: "gun", 765: "chair", 766: "kitchen_appliance",
    768: "ball", 769: "measuring_instrument", 770: "shoe",
    771: "box", 772: "fastener", 773: "tableware", 774: "shoe",
    775: "skirt", 776: "wind_instrument", 777: "container",
    778: "measuring_instrument", 779: "bus", 780: "sailing_vessel",
    781: "signboard", 783: "fastener", 784: "tool", 785: "restraint",
    786: "machine", 787: "armor", 788: "shop", 790: "basket",
    791: "cart", 792: "tool", 793: "cap", 794: "curtain",
    795: "sports_equipment", 796: "cap", 797: "furnishing",
    798: "measuring_instrument", 799: "barrier", 800: "machine",
    801: "device", 802: "motor_vehicle", 803: "truck", 804: "container",
    805: "ball", 806: "hosiery", 807: "device", 808: "hat",
    809: "bowl", 811: "appliance", 812: "craft", 813: "utensil",
    814: "boat", 815: "natural_object", 816: "implement", 817: "car",
    818: "light", 819: "structure", 820: "locomotive", 821: "bridge",
    822: "drum", 823: "medical_instrument", 824: "garment",
    825: "wall", 826: "watch", 827: "kitchen_appliance",
    828: "utensil", 829: "self_propelled_vehicle", 830: "conveyance",
    831: "couch", 832: "place_of_worship", 833: "ship",
    835: "timepiece", 836: "optical_instrument", 837: "optical_instrument",
    839: "bridge", 840: "implement", 841: "sweater", 842: "swimsuit",
    843: "toy", 844: "device", 845: "medical_instrument",
    846: "lamp", 847: "military_vehicle", 848: "electronic_equipment",
    849: "pot", 850: "toy", 851: "electronic_equipment",
    852: "ball", 854: "curtain", 855: "covering", 856: "machine",
    857: "chair", 858: "roof", 859: "kitchen_appliance", 860: "shop",
    861: "seat", 862: "light", 863: "monument", 864: "truck",
    865: "shop", 866: "self_propelled_vehicle", 867: "truck",
    869: "coat", 870: "wheeled_vehicle", 871: "sailing_vessel",
    872: "equipment", 873: "arch", 874: "bus", 875: "brass_instrument",
    876: "vessel", 877: "barrier", 878: "keyboard", 879: "machine",
    880: "wheeled_vehicle", 881: "piano", 882: "appliance",
    883: "vessel", 884: "structure", 885: "fabric", 886: "machine",
    887: "garment", 888: "bridge", 889: "stringed_instrument",
    890: "ball", 891: "kitchen_appliance", 892: "clock", 893: "container",
    894: "wardrobe", 895: "airplane", 896: "vessel", 897: "white_goods",
    898: "bottle", 899: "jug", 900: "tower", 901: "jug", 903: "headgear",
    904: "protective_covering", 905: "furnishing", 906: "necktie",
    907: "bottle", 909: "pan", 910: "cutlery", 911: "fabric",
    912: "fence", 913: "ship", 914: "sailing_vessel", 915: "dwelling",
    916: "product", 917: "book", 918: "toy", 919: "signboard",
    920: "light", 921: "covering", 922: "creation", 923: "plate",
    925: "soup", 927: "dessert", 928: "dessert", 929: "dessert",
    930: "bread", 931: "bread", 932: "bread",
    966: "wine", 969: "beverage",
    970: "mountain", 971: "thing", 973: "reef", 975: "shore",
    978: "shore", 980: "mountain",
    434: "fabric",
    438: "vessel",
    455: "covering",
    458: "monument",
    461: "armor",
    470: "light",
    476: "machine",
    571: "machine",
    574: "ball",
    581: "barrier",
    599: "natural_object",
    616: "fastener",
    619: "protective_covering",
    622: "protective_covering",
    629: "artifact",
    649: "monument",
    678: "device",
    694: "device",
    708: "structure",
    714: "device",
    767: "implement",
    782: "covering",
    810: "device",
    834: "garment",
    838: "artifact",
    908: "airplane",
    989: "fruit",
}

# The one duplicate in the raw list (264 the dog vs 474 the sweater).
VOCAB_RENAMES = {264: "Cardigan Welsh corgi", 408: "amphibious vehicle"}


def vocabulary() -> list[tuple[int, str]]:
    names = list(_meta._IMAGENET_CATEGORIES)
    assert len(names) == 1000
    for idx, name in VOCAB_RENAMES.items():
        names[idx] = name
    normed = [normalize_label(n) for n in names]
    assert len(set(normed)) == 1000, "vocabulary names must be unique"
    return list(enumerate(names))


def placement(idx: int) -> str:
    if idx in OVERRIDES:
        return OVERRIDES[idx]
    for lo, hi, node in DEFAULT_RANGES:
        if lo <= idx <= hi:
            return node
    raise AssertionError(f"class {idx} not covered")


def main() -> None:
    vocab = vocabulary()
    onto_ids = {nid for nid, _, _ in ONTOLOGY}
    onto_lemmas: set[str] = set()
    for _, lemma_col, _ in ONTOLOGY:
        onto_lemmas.update(normalize_label(l) for l in lemma_col.split("|"))

    lines = [
        "# Hypernym taxonomy: node_id <TAB> lemma|lemma <TAB> hypernym|hypernym",
        "# Hand-curated upper ontology plus the 1000-class vocabulary.",
    ]
    for nid, lemmas, hypers in ONTOLOGY:
        assert all(h in onto_ids for h in hypers.split("|") if h), nid
        lines.append(f"{nid}\t{lemmas}\t{hypers}")

    for idx, name in vocab:
        lemma = normalize_label(name)
        parent = placement(idx)
        assert parent in onto_ids, f"class {idx}: unknown parent {parent}"
        if lemma in onto_lemmas:
            continue  # the ontology node already carries this lemma
        lines.append(f"in{idx:04d}\t{lemma}\t{parent}")

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    tax_path = DATA_DIR / "taxonomy.tsv"
    tax_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    vocab_path = DATA_DIR / "imagenet_vocabulary.tsv"
    vocab_path.write_text(
        "\n".join(f"{idx}\t{name}" for idx, name in vocab) + "\n", encoding="utf-8"
    )

    # Sanity: load through the real parser and spot-check key relations.
    tax = load_taxonomy(tax_path)
    from advsem.taxonomy import is_broader

    checks = [
        ("dog", "basenji", True),
        ("carnivore", "basenji", True),
        ("animal", "basenji", True),
        ("dog", "kimono", False),
        ("clothing", "kimono", True),
        ("tower", "bell_cote", True),
        ("coffee", "espresso", True),
        ("tableware", "cup", True),
        ("tableware", "espresso", False),
        ("basenji", "basenji", False),
        ("basenji", "dog", False),
        ("mug", "cup", False),
        ("cup", "mug", False),
    ]
    for broader, narrower, expect in checks:
        got = is_broader(tax, broader, narrower)
        assert got == expect, (broader, narrower, expect, got)
    # every vocabulary name resolves
    for _, name in vocab:
        assert tax.contains_label(normalize_label(name)), name
    print(f"wrote {tax_path} ({len(tax)} nodes) and {vocab_path}")


if __name__ == "__main__":
    main()
