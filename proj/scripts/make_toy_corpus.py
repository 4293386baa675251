#!/usr/bin/env python3
"""Writes data/toy_corpus.csv, the 30-article sample corpus used by tests and docs."""
import csv
import sys

ARTICLES = [
    ("New seed varieties help farmers beat drought",
     "2015-02-11", "scidev",
     "Researchers in Kenya have released new maize seed varieties that tolerate drought. "
     "Farmers who planted the improved seed reported better yields during the dry season. "
     "Dr. Wanjiru said the technology gives smallholder farmers a real advantage. "
     "The seed company plans to expand distribution across the region next year."),
    ("Erratic rainfall threatens harvest in the Sahel",
     "2015-06-03", "conversation",
     "Erratic rainfall across the Sahel has delayed planting for millions of farmers. "
     "Climate scientists warn that the rainy season is becoming shorter and less predictable. "
     "Failed harvests could push food prices higher and worsen hunger. "
     "Farmers are struggling to cope with the changing weather."),
    ("Cassava disease spreads to new districts",
     "2016-01-20", "scidev",
     "Cassava brown streak disease has spread to three new districts in Uganda. "
     "The disease destroys the roots and can wipe out an entire harvest. "
     "Scientists are testing resistant cassava varieties in field trials. "
     "Farmers fear heavy losses if the outbreak is not contained quickly."),
    ("Irrigation scheme transforms dry land into productive farms",
     "2016-04-14", "conversation",
     "A small irrigation scheme in Ethiopia has transformed dry land into productive farms. "
     "Farmers now grow vegetables throughout the year using water from a nearby river. "
     "Soil quality has improved because farmers rotate crops and add compost. "
     "The project shows how land management can reduce poverty."),
    ("Grain prices fall as markets open to trade",
     "2016-09-08", "scidev",
     "Grain prices fell sharply after the government opened regional markets to trade. "
     "Traders welcomed the reform, saying it would improve food supply in cities. "
     "However, some farmers complained that lower prices hurt their income. "
     "Economists expect prices to stabilise as demand grows."),
    ("Fall armyworm devastates maize crops",
     "2017-03-02", "conversation",
     "The fall armyworm pest has devastated maize crops across southern Africa. "
     "The insect eats leaves and cobs, destroying whole fields within days. "
     "Governments are rushing to supply pesticides, but farmers say help is too slow. "
     "Researchers warn the pest could spread further if not controlled."),
    ("Mobile data services give farmers weather information",
     "2017-05-19", "scidev",
     "A mobile data service now sends weather forecasts and market information to farmers. "
     "Farmers receive text messages about rainfall and planting dates. "
     "Early results show that farmers who use the service get higher yields. "
     "The innovation is popular with young farmers and women."),
    ("Land reform sparks debate over ownership",
     "2017-08-30", "conversation",
     "A proposed land reform has sparked debate over who should own farm land. "
     "Supporters say the reform will give smallholder farmers secure land rights. "
     "Critics argue the policy could discourage investment and reduce production. "
     "The government promised to consult farmers before passing the law."),
    ("Women farmers gain access to credit",
     "2018-01-15", "scidev",
     "A new credit scheme helps women farmers buy seed and fertiliser. "
     "Banks had often refused loans to women because they lacked land titles. "
     "The scheme has already reached thousands of households. "
     "Women say the loans have improved their income and food security."),
    ("Drought forces herders to move livestock",
     "2018-03-22", "conversation",
     "A severe drought has forced herders in northern Kenya to move their livestock. "
     "Water sources have dried up and pasture is scarce. "
     "Conflict between herders and farmers over water is rising. "
     "Aid agencies warn that the drought could become a humanitarian crisis."),
    ("Soil testing improves fertiliser use",
     "2018-06-11", "scidev",
     "Cheap soil testing kits are helping farmers apply the right amount of fertiliser. "
     "Farmers who test their soil save money and protect the land. "
     "Scientists say healthy soil is the foundation of good yields. "
     "The kits are now sold in rural shops."),
    ("Climate change shifts growing seasons",
     "2018-09-04", "conversation",
     "Climate change is shifting growing seasons across East Africa. "
     "Rising temperatures and changing rainfall patterns affect when farmers can plant. "
     "Some tree species are also moving to higher altitudes. "
     "Scientists urge farmers to adopt climate smart agriculture."),
    ("Fish farming offers new income for coastal communities",
     "2018-11-27", "scidev",
     "Fish farming is offering new income for coastal communities in Ghana. "
     "The fishery project trains young people to manage ponds and sell fish. "
     "Conservation groups say aquaculture reduces pressure on wild fish stocks. "
     "Demand for fish in local markets remains strong."),
    ("Potato blight hits highland farmers",
     "2019-02-06", "conversation",
     "Potato blight has hit highland farmers after weeks of wet weather. "
     "The disease spreads fast in cool and humid conditions. "
     "Farmers lost much of their potato harvest and face lower income. "
     "Researchers are breeding potato varieties that resist the disease."),
    ("Youth turn to agriculture through innovation hubs",
     "2019-04-18", "scidev",
     "Innovation hubs are encouraging young people to start farming businesses. "
     "The youth learn irrigation, marketing and digital tools. "
     "Many young farmers say agriculture can be profitable and exciting. "
     "The initiative has created hundreds of jobs."),
    ("Trade restrictions raise fertiliser prices",
     "2019-06-25", "conversation",
     "New trade restrictions have raised fertiliser prices for farmers. "
     "Importers say the policy has disrupted supply chains. "
     "Farmers fear that high input prices will reduce their yields. "
     "The government said it will review the restrictions."),
    ("Floods destroy crops and homes",
     "2019-08-09", "scidev",
     "Heavy floods have destroyed crops and homes in Mozambique. "
     "The floods followed a powerful cyclone that brought torrential rainfall. "
     "Thousands of farmers lost their harvest and their livestock. "
     "Aid groups are distributing seed so farmers can replant."),
    ("Agroforestry restores degraded land",
     "2019-10-30", "conversation",
     "Agroforestry is helping farmers restore degraded land in Malawi. "
     "Farmers plant trees alongside maize to improve soil and water retention. "
     "The trees also provide fruit, fuel and extra income. "
     "Researchers say the approach is a great success."),
    ("Solar pumps cut irrigation costs",
     "2015-11-12", "scidev",
     "Solar powered pumps are cutting irrigation costs for smallholder farmers. "
     "The pumps replace expensive diesel and bring water to dry fields. "
     "Farmers now grow crops in the dry season and earn more income. "
     "Energy experts say solar technology is a clean and affordable solution."),
    ("Researchers map wheat rust outbreaks",
     "2016-07-07", "conversation",
     "Researchers have mapped outbreaks of wheat rust across Ethiopia. "
     "The fungal disease can destroy entire wheat fields. "
     "Scientists use mobile data from farmers to track the spread of the disease. "
     "The information helps breeders develop resistant wheat varieties."),
    ("Locust swarms threaten food security",
     "2020-02-14", "scidev",
     "Huge locust swarms are threatening food security in East Africa. "
     "The insects destroy crops and pasture within hours. "
     "Governments are spraying pesticides, but the swarms keep growing. "
     "Experts warn of severe losses for farmers."),
    ("Rice farmers adopt improved seed",
     "2014-10-21", "conversation",
     "Rice farmers in Tanzania are adopting improved seed and better water management. "
     "The new seed matures faster and produces more grain. "
     "Farmers say their yields have doubled since they switched. "
     "Agricultural officers train farmers in planting techniques."),
    ("Market information helps traders cut losses",
     "2017-12-05", "scidev",
     "Digital market information helps traders and farmers reduce post harvest losses. "
     "Traders know where demand is high and can move produce quickly. "
     "Farmers get fair prices because they compare markets before selling. "
     "The platform is growing fast."),
    ("Rainfall insurance protects smallholder farmers",
     "2018-07-16", "conversation",
     "Index insurance based on rainfall data is protecting smallholder farmers. "
     "When rainfall falls below a threshold, farmers receive automatic payments. "
     "The scheme helps households recover after drought. "
     "Insurers say more farmers are joining each season."),
    ("Water scarcity limits vegetable production",
     "2019-03-13", "scidev",
     "Water scarcity is limiting vegetable production around growing cities. "
     "Farmers compete with households and industry for scarce water. "
     "Some farmers use waste water, which raises health risks. "
     "City planners are looking for better water policy."),
    ("Banana disease spreads in East Africa",
     "2016-11-23", "conversation",
     "Banana bacterial wilt is spreading across farms in East Africa. "
     "The disease kills plants and causes severe losses for farmers. "
     "Farmers are told to remove infected plants and clean their tools. "
     "Scientists are developing resistant banana varieties."),
    ("Climate scientists predict hotter decade",
     "2017-10-10", "scidev",
     "Climate scientists predict a hotter decade for African agriculture. "
     "Higher temperatures will stress crops and livestock. "
     "Changing rainfall will make planting decisions harder for farmers. "
     "Researchers call for investment in climate research."),
    ("Cooperative helps farmers negotiate better prices",
     "2018-04-26", "conversation",
     "A farmers cooperative is helping members negotiate better prices for coffee. "
     "By selling together, farmers gain power in the market. "
     "The cooperative also provides credit and training. "
     "Members say their income has grown steadily."),
    ("Policy reform opens seed sector",
     "2015-08-17", "scidev",
     "A policy reform has opened the seed sector to private companies. "
     "Farmers now have access to more seed varieties. "
     "Critics worry that seed prices will rise. "
     "The government says the reform will boost innovation and yields."),
    ("Hailstorm damages tea plantations",
     "2020-05-05", "conversation",
     "A violent hailstorm has damaged tea plantations in the highlands. "
     "Farmers lost leaves that were ready for harvest. "
     "The weather service warned of more storms this season. "
     "Farmers are worried about their income."),
]


def main(path):
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(["id", "title", "content", "published", "source"])
        for i, (title, date, source, content) in enumerate(ARTICLES):
            writer.writerow([f"doc{i:02d}", title, content, date, source])
    print(f"wrote {len(ARTICLES)} articles to {path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/toy_corpus.csv")
